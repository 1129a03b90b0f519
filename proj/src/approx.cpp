#include "surfcert/approx.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "surfcert/parallel.hpp"

namespace surfcert {

namespace {

void exponents_of_degree(int dim, int remaining, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
  const auto var = current.size();
  if (var + 1 == static_cast<std::size_t>(dim)) {
    current.push_back(remaining);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current.push_back(e);
    exponents_of_degree(dim, remaining - e, current, out);
    current.pop_back();
  }
}

struct TangentialSplit {
  AmbientVector tangential;
  AmbientVector normal;
};

TangentialSplit split(const Surface& s, const AmbientVector& w, ChartPoint p) {
  const Eigen::MatrixXd j = s.jacobian(p);
  const Mat2 g = j.transpose() * j;
  if (!(g.determinant() > kDegenerateDet)) {
    std::ostringstream msg;
    msg << "det g = " << g.determinant() << " at (" << p.u << ", " << p.v << ")";
    throw Error(ErrorKind::degenerate_metric, msg.str());
  }
  const Vec2 coeffs = g.ldlt().solve(j.transpose() * w);
  TangentialSplit out;
  out.tangential = j * coeffs;
  out.normal = w - out.tangential;
  return out;
}

struct Verification {
  double min_tangential_norm = 0.0;
  double max_orthogonality_defect = 0.0;
};

Verification verify_projection(const Surface& s, const PolynomialField& poly, const AmbientFieldSamples& verify) {
  const std::size_t n = verify.points.size();
  std::vector<double> norms(n), defects(n);
  parallel_for(n, [&](std::size_t k) {
    const FieldSample& sample = verify.points[k];
    const TangentialSplit parts = split(s, poly(sample.position), sample.point);
    norms[k] = parts.tangential.norm();
    defects[k] = std::abs(parts.tangential.dot(parts.normal));
  });
  Verification v;
  v.min_tangential_norm = n == 0 ? 0.0 : *std::min_element(norms.begin(), norms.end());
  v.max_orthogonality_defect = n == 0 ? 0.0 : *std::max_element(defects.begin(), defects.end());
  return v;
}

}  // namespace

AmbientFieldSamples sample_unit_field(const Surface& s, const TangentField& x, const GridSampling& grid,
                                      double floor) {
  AmbientFieldSamples out;
  out.grid = {grid.nu, grid.nv};
  out.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const ChartPoint p = grid.points[k];
    const AmbientVector pushed = s.jacobian(p) * x(p);
    const double norm = pushed.norm();
    if (!(norm >= floor)) {
      std::ostringstream msg;
      msg << "|J X| = " << norm << " below floor " << floor << " at (" << p.u << ", " << p.v << ")";
      throw Error(ErrorKind::zero_field_point, msg.str());
    }
    out.points[k] = FieldSample{p, s.embed(p), pushed / norm};
  });
  out.unit_certified = std::all_of(out.points.begin(), out.points.end(), [](const FieldSample& f) {
    return std::abs(f.value.norm() - 1.0) <= 1e-12;
  });
  return out;
}

MonomialBasis::MonomialBasis(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1 || degree < 0) throw Error(ErrorKind::invalid_parameter, "monomial basis needs dim >= 1, degree >= 0");
  std::vector<int> current;
  for (int k = 0; k <= degree; ++k) exponents_of_degree(dim, k, current, exponents_);
}

Eigen::VectorXd MonomialBasis::evaluate(const AmbientVector& x) const {
  Eigen::MatrixXd powers(dim_, degree_ + 1);
  for (int c = 0; c < dim_; ++c) {
    powers(c, 0) = 1.0;
    for (int e = 1; e <= degree_; ++e) powers(c, e) = powers(c, e - 1) * x[c];
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(exponents_.size()));
  for (std::size_t m = 0; m < exponents_.size(); ++m) {
    double value = 1.0;
    for (int c = 0; c < dim_; ++c) value *= powers(c, exponents_[m][static_cast<std::size_t>(c)]);
    out[static_cast<Eigen::Index>(m)] = value;
  }
  return out;
}

AmbientVector PolynomialField::operator()(const AmbientVector& x) const {
  return coefficients * basis.evaluate(x);
}

PolynomialField fit_polynomial_field(const AmbientFieldSamples& samples, int degree) {
  if (samples.points.empty()) throw Error(ErrorKind::invalid_parameter, "no samples to fit");
  const int dim = static_cast<int>(samples.points.front().position.size());
  PolynomialField poly;
  poly.basis = MonomialBasis(dim, degree);
  poly.fit_grid = samples.grid;
  const auto rows = static_cast<Eigen::Index>(samples.points.size());
  const auto cols = static_cast<Eigen::Index>(poly.basis.size());
  if (rows < cols) {
    std::ostringstream msg;
    msg << samples.points.size() << " samples cannot determine " << poly.basis.size() << " monomials of degree "
        << degree;
    throw Error(ErrorKind::rank_deficient_fit, msg.str());
  }

  Eigen::MatrixXd design(rows, cols);
  Eigen::MatrixXd rhs(rows, dim);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const FieldSample& sample = samples.points[static_cast<std::size_t>(r)];
    design.row(r) = poly.basis.evaluate(sample.position).transpose();
    rhs.row(r) = sample.value.transpose();
  }
  Eigen::VectorXd scale = design.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (scale[c] == 0.0) scale[c] = 1.0;
  }
  design = design * scale.cwiseInverse().asDiagonal();

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> qr(rows, cols);
  qr.setThreshold(kFitRankThreshold);
  qr.compute(design);
  poly.rank = static_cast<std::size_t>(qr.rank());
  if (poly.rank == 0) throw Error(ErrorKind::rank_deficient_fit, "design matrix has numerical rank 0");
  const Eigen::MatrixXd scaled = qr.solve(rhs);
  poly.coefficients = (scale.cwiseInverse().asDiagonal() * scaled).transpose();
  return poly;
}

double certify_sup_error(PolynomialField& p, const AmbientFieldSamples& verify) {
  const auto& f = p.fit_grid;
  const auto& v = verify.grid;
  if (v[0] < 4 * f[0] || v[1] < 4 * f[1]) {
    std::ostringstream msg;
    msg << "verification grid " << v[0] << "x" << v[1] << " is not 4x denser than fit grid " << f[0] << "x"
        << f[1];
    throw Error(ErrorKind::invalid_parameter, msg.str());
  }
  std::vector<double> errors(verify.points.size());
  parallel_for(verify.points.size(), [&](std::size_t k) {
    errors[k] = (p(verify.points[k].position) - verify.points[k].value).norm();
  });
  p.sup_error = errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
  p.verify_grid = v;
  return p.sup_error;
}

PolynomialField fit_polynomial_field(const AmbientFieldSamples& fit, const AmbientFieldSamples& verify,
                                     int degree) {
  PolynomialField p = fit_polynomial_field(fit, degree);
  certify_sup_error(p, verify);
  return p;
}

AmbientVector tangential_projection(const Surface& s, const AmbientVector& w, ChartPoint p) {
  return split(s, w, p).tangential;
}

AmbientVector tangential_projection(const Surface& s, const PolynomialField& poly, ChartPoint p) {
  return tangential_projection(s, poly(s.embed(p)), p);
}

BudgetNotMet::BudgetNotMet(SmoothedFieldReport report)
    : Error(ErrorKind::budget_not_met,
            [&report] {
              std::ostringstream msg;
              msg << "best sup error " << report.sup_error << " at degree " << report.final_degree
                  << " is not below " << report.target;
              return msg.str();
            }()),
      report_(std::move(report)) {}

std::vector<int> degree_schedule(int max_degree) {
  std::vector<int> out;
  for (int d = 2; d <= max_degree; d += 2) out.push_back(d);
  if (out.empty() || out.back() != max_degree) out.push_back(std::max(0, max_degree));
  return out;
}

SmoothedField smooth_field(const Surface& s, const TangentField& x, const SmoothOptions& opts) {
  const auto fit_grid = chart_grid(s, opts.fit_grid[0], opts.fit_grid[1]);
  const auto verify_grid = chart_grid(s, opts.verify_grid[0], opts.verify_grid[1]);
  const AmbientFieldSamples fit = sample_unit_field(s, x, fit_grid, opts.floor);
  const AmbientFieldSamples verify = sample_unit_field(s, x, verify_grid, opts.floor);

  SmoothedFieldReport report;
  std::optional<PolynomialField> best;
  for (int degree : degree_schedule(opts.max_degree)) {
    PolynomialField p;
    try {
      p = fit_polynomial_field(fit, degree);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::rank_deficient_fit) throw;
      break;
    }
    certify_sup_error(p, verify);
    report.attempts.push_back({degree, p.sup_error, p.basis.size(), p.rank});
    const bool better = !best || p.sup_error < best->sup_error;
    if (better) best = std::move(p);
    if (best->sup_error < report.target) break;
  }
  if (!best) throw BudgetNotMet(report);

  const Verification check = verify_projection(s, *best, verify);
  report.final_degree = best->degree();
  report.sup_error = best->sup_error;
  report.min_tangential_norm = check.min_tangential_norm;
  report.max_orthogonality_defect = check.max_orthogonality_defect;
  report.pass = report.sup_error < report.target && report.min_tangential_norm > report.target - 1e-9;
  if (!(report.sup_error < report.target)) throw BudgetNotMet(report);

  TangentField field([s, poly = *best](ChartPoint p) -> Vec2 {
    const Eigen::MatrixXd j = s.jacobian(p);
    const Mat2 g = j.transpose() * j;
    return g.ldlt().solve(j.transpose() * poly(s.embed(p)));
  });
  return SmoothedField{std::move(report), std::move(*best), std::move(field)};
}

void write_polynomial_field(std::ostream& out, const PolynomialField& p) {
  out << "polynomial_field 1\n";
  out << "ambient_dim " << p.ambient_dim() << "\n";
  out << "degree " << p.degree() << "\n";
  out << "ordering grlex\n";
  out << "terms " << p.basis.size() << "\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::scientific << std::setprecision(16);
  out << "sup_error " << p.sup_error << "\n";
  for (Eigen::Index c = 0; c < p.coefficients.rows(); ++c) {
    for (Eigen::Index m = 0; m < p.coefficients.cols(); ++m) {
      if (m > 0) out << ' ';
      out << p.coefficients(c, m);
    }
    out << "\n";
  }
  out.flags(flags);
  out.precision(precision);
}

PolynomialField read_polynomial_field(std::istream& in) {
  const auto fail = [](const std::string& what) -> PolynomialField {
    throw Error(ErrorKind::invalid_parameter, "malformed polynomial field file: " + what);
  };
  std::string key;
  int version = 0, dim = 0, degree = 0;
  std::size_t terms = 0;
  std::string ordering;
  if (!(in >> key >> version) || key != "polynomial_field" || version != 1) return fail("header");
  if (!(in >> key >> dim) || key != "ambient_dim") return fail("ambient_dim");
  if (!(in >> key >> degree) || key != "degree") return fail("degree");
  if (!(in >> key >> ordering) || key != "ordering" || ordering != "grlex") return fail("ordering");
  if (!(in >> key >> terms) || key != "terms") return fail("terms");
  PolynomialField p;
  p.basis = MonomialBasis(dim, degree);
  if (terms != p.basis.size()) return fail("term count does not match dim and degree");
  // NaN is written as "nan" for uncertified fields.
  std::string sup;
  if (!(in >> key >> sup) || key != "sup_error") return fail("sup_error");
  p.sup_error = std::strtod(sup.c_str(), nullptr);
  p.coefficients.resize(dim, static_cast<Eigen::Index>(terms));
  for (int c = 0; c < dim; ++c) {
    for (std::size_t m = 0; m < terms; ++m) {
      if (!(in >> p.coefficients(c, static_cast<Eigen::Index>(m)))) return fail("coefficient rows");
    }
  }
  p.rank = terms;
  return p;
}

}  // namespace surfcert

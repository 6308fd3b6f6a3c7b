#include "arealaw/locality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "arealaw/io.hpp"

namespace arealaw {

namespace {

// ||A B - B A|| with B given as a local operator.
double commutator_norm(const CMatrix& a_full, const LocalOperator& b) {
  kernels::Split s = split_for(b.support, b.n_sites, b.local_dim);
  CMatrix ba = a_full;
  kernels::apply_local_columns(b.matrix, s, ba); // B A
  CMatrix ab_adj = a_full.adjoint();
  kernels::apply_local_columns(b.matrix.adjoint(), s, ab_adj); // (A B)^dagger
  CMatrix c = ab_adj.adjoint() - ba;
  return linalg::operator_norm(c);
}

} // namespace

CommutatorProfile lieb_robinson_scan(const SpectralData& sd, const LocalOperator& a,
                                     const std::vector<LocalOperator>& bs, const std::vector<double>& times) {
  CommutatorProfile p;
  p.a_norm = a.norm();
  p.a_support = a.support.length();
  for (const LocalOperator& b : bs) {
    p.b_norm = std::max(p.b_norm, b.norm());
    if (distance(a.support, b.support) == 0) p.overlapping = true;
  }
  CMatrix a_full = a.dense();
  for (double t : times) {
    CMatrix at = t == 0.0 ? a_full : evolve(sd, a_full, t);
    for (const LocalOperator& b : bs)
      p.rows.push_back({t, distance(a.support, b.support), commutator_norm(at, b)});
  }
  return p;
}

CommutatorProfile commutator_norm_profile(const SpectralData& sd, const LocalOperator& a,
                                          const LocalOperator& b, const std::vector<double>& times) {
  return lieb_robinson_scan(sd, a, {b}, times);
}

CommutatorProfile commutator_norm_profile(const Hamiltonian1D& h, const LocalOperator& a,
                                          const LocalOperator& b, const std::vector<double>& times) {
  DiagonalizationOptions opts;
  opts.degeneracy_tolerance = -1.0; // dynamics do not need a gap
  SpectralData sd = diagonalize(h, opts);
  return commutator_norm_profile(sd, a, b, times);
}

LocalityConstants make_locality_constants(double v, double xi_c, double delta_e, double c) {
  if (v <= 0.0 || xi_c <= 0.0 || delta_e <= 0.0) throw ConfigError("locality constants must be positive");
  LocalityConstants k;
  k.v = v;
  k.xi_c = xi_c;
  k.xi = std::max(2.0 * v / delta_e, xi_c);
  k.xi_prime = 6.0 * k.xi;
  k.c = c;
  return k;
}

LocalityConstants fit_locality_constants(const CommutatorProfile& profile, double delta_e, const FitOptions& opts) {
  FitDiagnostics diag;
  std::set<int> distances;
  std::set<double> times;
  for (const auto& r : profile.rows) {
    distances.insert(r.distance);
    times.insert(r.time);
  }
  if (distances.size() < 3 || times.size() < 3)
    throw FitError("profile needs at least 3 distances and 3 times", diag);
  const double scale = profile.a_norm * profile.b_norm;
  bool any = std::any_of(profile.rows.begin(), profile.rows.end(),
                         [&](const CommutatorSample& r) { return r.norm > opts.floor; });
  if (!any || scale <= 0.0) throw FitError("degenerate fit: all commutator norms vanish", diag);

  const double threshold = opts.envelope_fraction * scale;
  double v = 0.0;
  double t_min = *std::find_if(times.begin(), times.end(), [](double t) { return t > 0.0; });
  for (const auto& r : profile.rows)
    if (r.time > 0.0 && r.norm > threshold && r.distance > 0) {
      v = std::max(v, r.distance / r.time);
      if (r.time == t_min) diag.velocity_from_grid = true;
    }
  if (v == 0.0) {
    // The front never crossed the envelope on this grid.
    v = *distances.rbegin() / *times.rbegin();
    diag.velocity_from_grid = true;
  }

  // Regress ln(norm) = a_t - d / xi_c over sub-ballistic rows, one intercept per time.
  std::map<double, std::vector<std::pair<double, double>>> groups;
  for (const auto& r : profile.rows)
    if (r.distance > 0 && r.norm > opts.floor && r.time <= r.distance / v * (1 + 1e-12))
      groups[r.time].push_back({double(r.distance), std::log(r.norm)});
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  std::vector<std::tuple<double, double, double>> centered; // dx, dy, mean_y
  for (auto& [t, pts] : groups) {
    if (pts.size() < 2) continue;
    double mx = 0.0, my = 0.0;
    for (auto& [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    for (auto& [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
      syy += (y - my) * (y - my);
      centered.emplace_back(x - mx, y - my, my);
    }
  }
  diag.points = static_cast<int>(centered.size());
  if (diag.points < 3 || sxx <= 0.0) throw FitError("too few sub-ballistic points for the decay fit", diag);
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (auto& [dx, dy, my] : centered) {
    double res = dy - slope * dx;
    diag.residuals.push_back(res);
    ssr += res * res;
  }
  diag.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  if (slope >= 0.0) throw FitError("commutator norms do not decay with distance", diag);
  if (diag.r_squared < opts.min_r_squared) throw FitError("decay fit R^2 below minimum", diag);

  const double xi_c = -1.0 / slope;
  double c = 0.0;
  for (const auto& r : profile.rows)
    if (r.distance > 0 && r.time <= r.distance / v * (1 + 1e-12))
      c = std::max(c, r.norm / (profile.a_support * scale * std::exp(-r.distance / xi_c)));
  LocalityConstants k = make_locality_constants(v, xi_c, delta_e, c);
  k.diagnostics = std::move(diag);
  return k;
}

LocalOperator truncate_support(const CMatrix& a, int n_sites, int local_dim, const Interval& x) {
  return conditional_expectation(a, n_sites, local_dim, x);
}

void write_profile_csv(std::ostream& out, const CommutatorProfile& p) {
  io::write_row(out, {"t", "distance", "norm"});
  for (const auto& r : p.rows) io::write_row(out, {io::num(r.time), std::to_string(r.distance), io::num(r.norm)});
}

void write_fit_report(std::ostream& out, const LocalityConstants& c) {
  out << "{\n";
  out << "  \"v\": " << io::num(c.v) << ",\n";
  out << "  \"xi_c\": " << io::num(c.xi_c) << ",\n";
  out << "  \"xi\": " << io::num(c.xi) << ",\n";
  out << "  \"xi_prime\": " << io::num(c.xi_prime) << ",\n";
  out << "  \"c\": " << io::num(c.c) << ",\n";
  out << "  \"r_squared\": " << io::num(c.diagnostics.r_squared) << ",\n";
  out << "  \"points\": " << c.diagnostics.points << ",\n";
  out << "  \"velocity_from_grid\": " << (c.diagnostics.velocity_from_grid ? "true" : "false") << ",\n";
  out << "  \"residuals\": [";
  for (size_t i = 0; i < c.diagnostics.residuals.size(); ++i)
    out << (i ? ", " : "") << io::num(c.diagnostics.residuals[i]);
  out << "]\n}\n";
}

} // namespace arealaw

namespace arealaw {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw NumericalError("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw NumericalError("fit_line: degenerate abscissae");
  LineFit f;
  f.points = static_cast<int>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

} // namespace arealaw

#include <rlmh/target.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>

#include <rlmh/laplace.hpp>

namespace rlmh {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;  // log(2*pi)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double> &terms) {
  double m = kNegInf;
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc);
}

}  // namespace

double log_normal_cdf(double t) {
  if (t > -10.0) return std::log(0.5 * std::erfc(-t * M_SQRT1_2));
  // Tail expansion: Phi(t) = phi(t)/(-t) * (1 - 1/t^2 + 3/t^4 - 15/t^6 + ...).
  const double t2 = t * t;
  const double series = 1.0 - 1.0 / t2 + 3.0 / (t2 * t2) - 15.0 / (t2 * t2 * t2);
  return -0.5 * t2 - 0.5 * kLogTwoPi - std::log(-t) + std::log(series);
}

double normal_hazard(double t) {
  if (t > -10.0) {
    const double phi = std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
    return phi / (0.5 * std::erfc(-t * M_SQRT1_2));
  }
  const double t2 = t * t;
  const double series = 1.0 - 1.0 / t2 + 3.0 / (t2 * t2) - 15.0 / (t2 * t2 * t2);
  return -t / series;
}

Target make_gaussian(const Vector &mean, const Matrix &sigma) {
  if (mean.size() != sigma.rows())
    throw std::invalid_argument("make_gaussian: mean/covariance dimension mismatch");
  auto factor = std::make_shared<CovarianceFactor>(factorize(sigma));
  const int d = static_cast<int>(mean.size());
  const double log_norm = -0.5 * d * kLogTwoPi - factor->log_det_half;

  Target t;
  t.dim = d;
  t.label = "gaussian";
  t.log_density = [mean, factor, log_norm](const Vector &x) {
    const Vector w = factor->L.triangularView<Eigen::Lower>().solve(x - mean);
    return log_norm - 0.5 * w.squaredNorm();
  };
  t.grad_log_density = [mean, factor](const Vector &x) {
    Vector w = factor->L.triangularView<Eigen::Lower>().solve(x - mean);
    factor->L.transpose().triangularView<Eigen::Upper>().solveInPlace(w);
    return Vector(-w);
  };
  return t;
}

Target make_mixture(const std::vector<double> &weights,
                    const std::vector<Target> &components) {
  if (components.empty() || weights.size() != components.size())
    throw std::invalid_argument("make_mixture: need one positive weight per component");
  const int d = components.front().dim;
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("make_mixture: weights must be positive");
    total += w;
  }
  for (const Target &c : components)
    if (c.dim != d) throw std::invalid_argument("make_mixture: components must share dimension");

  auto log_weights = std::make_shared<std::vector<double>>();
  for (double w : weights) log_weights->push_back(std::log(w / total));
  auto parts = std::make_shared<std::vector<Target>>(components);

  Target t;
  t.dim = d;
  t.label = "mixture";
  t.log_density = [log_weights, parts](const Vector &x) {
    std::vector<double> terms(parts->size());
    for (size_t j = 0; j < parts->size(); ++j)
      terms[j] = (*log_weights)[j] + (*parts)[j].log_density(x);
    return log_sum_exp(terms);
  };
  bool all_grads = std::all_of(components.begin(), components.end(),
                               [](const Target &c) { return bool(c.grad_log_density); });
  if (all_grads) {
    t.grad_log_density = [log_weights, parts, d](const Vector &x) {
      std::vector<double> terms(parts->size());
      for (size_t j = 0; j < parts->size(); ++j)
        terms[j] = (*log_weights)[j] + (*parts)[j].log_density(x);
      const double lp = log_sum_exp(terms);
      Vector g = Vector::Zero(d);
      for (size_t j = 0; j < parts->size(); ++j) {
        const double resp = std::exp(terms[j] - lp);
        if (resp > 0.0) g += resp * (*parts)[j].grad_log_density(x);
      }
      return g;
    };
  }
  return t;
}

Target make_gaussian_mixture(const std::vector<double> &weights,
                             const std::vector<Vector> &means,
                             const std::vector<Matrix> &sigmas) {
  if (means.size() != sigmas.size())
    throw std::invalid_argument("make_gaussian_mixture: need one covariance per mean");
  std::vector<Target> parts;
  parts.reserve(means.size());
  for (size_t j = 0; j < means.size(); ++j)
    parts.push_back(make_gaussian(means[j], sigmas[j]));
  Target t = make_mixture(weights, parts);
  t.label = "gmm";
  return t;
}

Target make_skew_normal(double location, double scale, double shape) {
  if (!(scale > 0.0)) throw std::invalid_argument("make_skew_normal: scale must be positive");
  Target t;
  t.dim = 1;
  t.label = "skew_normal";
  t.log_density = [location, scale, shape](const Vector &x) {
    const double z = (x(0) - location) / scale;
    return std::log(2.0) - std::log(scale) - 0.5 * z * z - 0.5 * kLogTwoPi +
           log_normal_cdf(shape * z);
  };
  t.grad_log_density = [location, scale, shape](const Vector &x) {
    const double z = (x(0) - location) / scale;
    Vector g(1);
    g(0) = (-z + shape * normal_hazard(shape * z)) / scale;
    return g;
  };
  return t;
}

Target make_skew_normal_mixture(const std::vector<double> &weights,
                                const std::vector<double> &locations,
                                const std::vector<double> &scales,
                                const std::vector<double> &shapes) {
  if (locations.size() != scales.size() || locations.size() != shapes.size())
    throw std::invalid_argument("make_skew_normal_mixture: parameter lists must align");
  std::vector<Target> parts;
  parts.reserve(locations.size());
  for (size_t j = 0; j < locations.size(); ++j)
    parts.push_back(make_skew_normal(locations[j], scales[j], shapes[j]));
  Target t = make_mixture(weights, parts);
  t.label = "skew_gmm";
  return t;
}

Vector grad_or_finite_difference(const Target &target, const Vector &x) {
  if (!std::isfinite(target.log_density(x)))
    throw std::invalid_argument("grad_or_finite_difference: log density not finite at x");
  if (target.grad_log_density) return target.grad_log_density(x);
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::abs(x(i)));
    probe(i) = x(i) + h;
    const double up = target.log_density(probe);
    probe(i) = x(i) - h;
    const double down = target.log_density(probe);
    probe(i) = x(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

ReferenceSample load_reference_samples(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_reference_samples: cannot open " + path);

  auto parse_cell = [](const std::string &cell, double &out) {
    const char *begin = cell.data();
    const char *end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
  };
  auto split = [](const std::string &line) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
      size_t comma = line.find(',', start);
      std::string cell = line.substr(start, comma == std::string::npos ? comma : comma - start);
      const auto first = cell.find_first_not_of(" \t\r");
      if (first == std::string::npos) {
        cell.clear();
      } else {
        const auto last = cell.find_last_not_of(" \t\r");
        cell = cell.substr(first, last - first + 1);
      }
      cells.push_back(cell);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return cells;
  };

  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  long cols = -1;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (size_t c = 0; c < cells.size(); ++c)
      if (!parse_cell(cells[c], row[c])) { numeric = false; break; }
    if (!numeric) {
      // A single leading header row is allowed; anything later is an error.
      if (rows.empty() && !header_seen) { header_seen = true; continue; }
      throw std::runtime_error("load_reference_samples: non-numeric cell at line " +
                               std::to_string(line_no) + " of " + path);
    }
    for (double v : row)
      if (!std::isfinite(v))
        throw std::runtime_error("load_reference_samples: non-finite value at line " +
                                 std::to_string(line_no) + " of " + path);
    if (cols < 0) cols = static_cast<long>(row.size());
    if (static_cast<long>(row.size()) != cols)
      throw std::runtime_error("load_reference_samples: ragged row at line " +
                               std::to_string(line_no) + " of " + path +
                               " (expected " + std::to_string(cols) + " columns)");
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::runtime_error("load_reference_samples: no data rows in " + path);

  Matrix points(static_cast<Eigen::Index>(rows.size()), cols);
  for (size_t r = 0; r < rows.size(); ++r)
    for (long c = 0; c < cols; ++c) points(static_cast<Eigen::Index>(r), c) = rows[r][c];
  return ReferenceSample{std::move(points), path};
}

}  // namespace rlmh

#include <rlmh/policy.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rlmh {

Policy make_policy(const Vector &center, const Matrix &sigma, int hidden,
                   double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("make_policy: radius must be positive");
  const int d = static_cast<int>(center.size());
  Policy p;
  p.net = make_mlp({d, hidden, d});
  p.center = center;
  p.factor = factorize(sigma);
  p.radius = radius;
  if (sigma.rows() != d) throw std::invalid_argument("make_policy: dimension mismatch");
  return p;
}

double ellipsoid_eta(const Policy &policy, const Vector &x) {
  const Vector w = policy.factor.L.triangularView<Eigen::Lower>().solve(x - policy.center);
  return w.squaredNorm() / (policy.radius * policy.radius);
}

double transition_gamma(double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("transition_gamma: eta must be >= 0");
  if (eta <= 0.5) return 0.0;
  if (eta >= 1.0) return 1.0;
  // 4 eta^2 - 6 eta + 2 = 2 (2 eta - 1)(eta - 1) is strictly negative here,
  // so the exponent runs from +inf (eta -> 1/2) to -inf (eta -> 1) and the
  // blend rises continuously from 0 to 1.
  const double t = (4.0 * eta - 3.0) / (4.0 * eta * eta - 6.0 * eta + 2.0);
  return 1.0 / (1.0 + std::exp(t));
}

Vector phi_map(const Policy &policy, const Vector &x) {
  const double eta = ellipsoid_eta(policy, x);
  if (eta >= 1.0) return x;
  const Vector psi =
      policy.center + policy.factor.L.triangularView<Eigen::Lower>() * mlp_forward(policy.net, x);
  const double g = transition_gamma(eta);
  return psi + g * (x - psi);
}

Vector phi_grad(const Policy &policy, const Vector &x, const Vector &upstream) {
  const double eta = ellipsoid_eta(policy, x);
  if (eta >= 1.0) return Vector::Zero(policy.net.theta.size());
  const double scale = 1.0 - transition_gamma(eta);
  const Vector pulled = scale * (policy.factor.L.transpose() * upstream);
  return mlp_grad(policy.net, x, pulled).theta;
}

double mean_shift_bound(const Policy &policy, const Matrix &probes) {
  if (probes.rows() < 1 || probes.cols() != policy.center.size())
    throw std::invalid_argument("mean_shift_bound: need probe rows of matching dimension");
  auto shift = [&policy](const Vector &x) {
    return norm1_sigma(policy.factor, x - phi_map(policy, x));
  };
  double bound = 0.0;
  Vector x(probes.cols());
  for (Eigen::Index r = 0; r < probes.rows(); ++r) {
    x = probes.row(r).transpose();
    bound = std::max(bound, shift(x));
    // Local refinement: nudge each coordinate both ways.
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double step = 1e-2 * (1.0 + std::abs(x(i)));
      Vector probe = x;
      probe(i) = x(i) + step;
      bound = std::max(bound, shift(probe));
      probe(i) = x(i) - step;
      bound = std::max(bound, shift(probe));
    }
  }
  return bound;
}

PretrainResult pretrain(Policy &policy, const Matrix &warm_samples,
                        const PretrainConfig &config, Rng &rng) {
  const auto m = warm_samples.rows();
  const int d = static_cast<int>(policy.center.size());
  if (m < 10) throw std::invalid_argument("pretrain: need at least 10 warm samples");
  if (warm_samples.cols() != d) throw std::invalid_argument("pretrain: dimension mismatch");

  const Matrix inputs = warm_samples.transpose();  // d x m, column-wise samples
  const Matrix targets = policy.factor.L.triangularView<Eigen::Lower>().solve(
      (-inputs).colwise() + policy.center);

  auto n_val = static_cast<Eigen::Index>(std::llround(config.val_fraction * static_cast<double>(m)));
  n_val = std::min(std::max<Eigen::Index>(n_val, 1), m - 1);
  const Eigen::Index n_train = m - n_val;
  const auto train_in = inputs.leftCols(n_train);
  const auto train_t = targets.leftCols(n_train);
  const auto val_in = inputs.rightCols(n_val);
  const auto val_t = targets.rightCols(n_val);

  auto val_loss = [&]() {
    return (mlp_forward_batch(policy.net, val_in) - val_t).squaredNorm() /
           static_cast<double>(n_val);
  };

  glorot_init(policy.net, rng);
  AdamState adam = make_adam(policy.net.theta.size(), config.lr);

  PretrainResult result;
  result.best_val_loss = val_loss();
  Vector best_theta = policy.net.theta;
  double current = result.best_val_loss;
  for (int epoch = 0; epoch < config.max_epochs && current >= config.val_threshold; ++epoch) {
    const Matrix residual = mlp_forward_batch(policy.net, train_in) - train_t;
    const Vector grad =
        mlp_grad_batch(policy.net, train_in, 2.0 * residual / static_cast<double>(n_train));
    adam_step(adam, policy.net.theta, grad);
    result.epochs_run = epoch + 1;
    current = val_loss();
    if (current < result.best_val_loss) {
      result.best_val_loss = current;
      best_theta = policy.net.theta;
    }
  }
  result.final_val_loss = current;
  policy.net.theta = best_theta;
  return result;
}

void save_policy(const Policy &policy, const std::string &path) {
  nlohmann::json doc;
  doc["format"] = "policy-checkpoint";
  doc["version"] = 1;
  doc["widths"] = policy.net.widths;
  doc["theta"] = std::vector<double>(policy.net.theta.begin(), policy.net.theta.end());
  doc["center"] = std::vector<double>(policy.center.begin(), policy.center.end());
  std::vector<std::vector<double>> chol;
  for (Eigen::Index i = 0; i < policy.factor.L.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < policy.factor.L.cols(); ++j)
      row.push_back(policy.factor.L(i, j));
    chol.push_back(std::move(row));
  }
  doc["chol"] = chol;
  doc["radius"] = policy.radius;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_policy: cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out.good()) throw std::runtime_error("save_policy: write failed for " + path);
}

Policy load_policy(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_policy: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception &e) {
    throw std::runtime_error("load_policy: invalid JSON in " + path + ": " + e.what());
  }
  if (doc.value("format", "") != "policy-checkpoint" || doc.value("version", 0) != 1)
    throw std::runtime_error("load_policy: unsupported checkpoint format in " + path);

  Policy p;
  const auto widths = doc.at("widths").get<std::vector<int>>();
  p.net = make_mlp(widths);
  const auto theta = doc.at("theta").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(theta.size()) != p.net.theta.size())
    throw std::runtime_error("load_policy: parameter count does not match widths in " + path);
  p.net.theta = Eigen::Map<const Vector>(theta.data(), theta.size());

  const auto center = doc.at("center").get<std::vector<double>>();
  p.center = Eigen::Map<const Vector>(center.data(), center.size());

  const auto chol = doc.at("chol").get<std::vector<std::vector<double>>>();
  const auto d = static_cast<Eigen::Index>(chol.size());
  Matrix L = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (static_cast<Eigen::Index>(chol[i].size()) != d)
      throw std::runtime_error("load_policy: ragged factor in " + path);
    for (Eigen::Index j = 0; j < d; ++j) L(i, j) = chol[i][j];
  }
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(L(i, i) > 0.0))
      throw std::runtime_error("load_policy: factor diagonal must be positive in " + path);
    log_det_half += std::log(L(i, i));
  }
  p.factor = CovarianceFactor{std::move(L), log_det_half};
  p.radius = doc.at("radius").get<double>();

  if (p.center.size() != d || p.net.input_dim() != d || p.net.output_dim() != d)
    throw std::runtime_error("load_policy: inconsistent dimensions in " + path);
  return p;
}

}  // namespace rlmh

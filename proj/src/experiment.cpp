#include <rlmh/experiment.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include <rlmh/metrics.hpp>

namespace rlmh {

namespace fs = std::filesystem;
using nlohmann::json;

int TargetSpec::dim() const {
  if (family == "gaussian") return static_cast<int>(mean.size());
  if (family == "gmm") return means.empty() ? 0 : static_cast<int>(means.front().size());
  return 1;  // both skew families are one-dimensional
}

Target make_target(const TargetSpec &spec) {
  if (spec.family == "gaussian") return make_gaussian(spec.mean, spec.sigma);
  if (spec.family == "gmm") return make_gaussian_mixture(spec.weights, spec.means, spec.sigmas);
  if (spec.family == "skew_normal")
    return make_skew_normal(spec.locations.at(0), spec.scales.at(0), spec.shapes.at(0));
  if (spec.family == "skew_gmm")
    return make_skew_normal_mixture(spec.weights, spec.locations, spec.scales, spec.shapes);
  throw std::runtime_error("make_target: unknown family '" + spec.family + "'");
}

namespace {

double skew_normal_draw(double location, double scale, double shape, Rng &rng) {
  // Conditioning representation: delta |u0| + sqrt(1 - delta^2) u1.
  const double delta = shape / std::sqrt(1.0 + shape * shape);
  const double u0 = normal01(rng);
  const double u1 = normal01(rng);
  return location + scale * (delta * std::abs(u0) + std::sqrt(1.0 - delta * delta) * u1);
}

size_t pick_component(const std::vector<double> &weights, Rng &rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform01(rng) * total;
  for (size_t j = 0; j < weights.size(); ++j) {
    u -= weights[j];
    if (u <= 0.0) return j;
  }
  return weights.size() - 1;
}

}  // namespace

Matrix sample_iid(const TargetSpec &spec, long n, Rng &rng) {
  if (n < 1) throw std::invalid_argument("sample_iid: need at least one draw");
  const int d = spec.dim();
  Matrix out(n, d);
  if (spec.family == "gaussian") {
    const CovarianceFactor factor = factorize(spec.sigma);
    for (long i = 0; i < n; ++i)
      out.row(i) =
          (spec.mean + factor.L.triangularView<Eigen::Lower>() * normal_vector(d, rng))
              .transpose();
  } else if (spec.family == "gmm") {
    std::vector<CovarianceFactor> factors;
    for (const Matrix &s : spec.sigmas) factors.push_back(factorize(s));
    for (long i = 0; i < n; ++i) {
      const size_t j = pick_component(spec.weights, rng);
      out.row(i) = (spec.means[j] +
                    factors[j].L.triangularView<Eigen::Lower>() * normal_vector(d, rng))
                       .transpose();
    }
  } else if (spec.family == "skew_normal") {
    for (long i = 0; i < n; ++i)
      out(i, 0) = skew_normal_draw(spec.locations.at(0), spec.scales.at(0), spec.shapes.at(0), rng);
  } else if (spec.family == "skew_gmm") {
    for (long i = 0; i < n; ++i) {
      const size_t j = pick_component(spec.weights, rng);
      out(i, 0) = skew_normal_draw(spec.locations[j], spec.scales[j], spec.shapes[j], rng);
    }
  } else {
    throw std::runtime_error("sample_iid: unknown family '" + spec.family + "'");
  }
  return out;
}

namespace {

[[noreturn]] void config_error(const std::string &message) {
  throw std::runtime_error("config: " + message);
}

void require_keys(const json &obj, const std::string &where,
                  const std::set<std::string> &allowed) {
  if (!obj.is_object()) config_error("'" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      config_error("unknown key '" + where + it.key() + "'");
}

double get_number(const json &obj, const std::string &where, const char *key,
                  double fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) config_error("missing key '" + where + key + "'");
    return fallback;
  }
  const json &v = obj.at(key);
  if (!v.is_number()) config_error("'" + where + key + "' must be a number");
  return v.get<double>();
}

long get_count(const json &obj, const std::string &where, const char *key, long fallback,
               long min_value = 1) {
  const double v = get_number(obj, where, key, static_cast<double>(fallback));
  const long n = static_cast<long>(std::llround(v));
  if (n != v || n < min_value)
    config_error("'" + where + key + "' must be an integer >= " + std::to_string(min_value));
  return n;
}

Vector get_vector(const json &v, const std::string &where) {
  if (!v.is_array() || v.empty()) config_error("'" + where + "' must be a non-empty array");
  Vector out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) config_error("'" + where + "' must hold numbers");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Matrix get_matrix(const json &v, const std::string &where) {
  if (!v.is_array() || v.empty()) config_error("'" + where + "' must be a non-empty 2-D array");
  const size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) config_error("'" + where + "' must be a non-empty 2-D array");
  Matrix out(v.size(), cols);
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols)
      config_error("'" + where + "' rows must all have " + std::to_string(cols) + " entries");
    for (size_t j = 0; j < cols; ++j) {
      if (!v[i][j].is_number()) config_error("'" + where + "' must hold numbers");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
    }
  }
  return out;
}

std::vector<double> get_double_list(const json &v, const std::string &where) {
  if (!v.is_array() || v.empty()) config_error("'" + where + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto &e : v) {
    if (!e.is_number()) config_error("'" + where + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

TargetSpec parse_target(const json &obj) {
  TargetSpec spec;
  if (!obj.contains("family")) config_error("missing key 'target.family'");
  spec.family = obj.at("family").get<std::string>();
  if (spec.family == "gaussian") {
    require_keys(obj, "target.", {"family", "mean", "sigma"});
    if (!obj.contains("mean") || !obj.contains("sigma"))
      config_error("gaussian target needs 'target.mean' and 'target.sigma'");
    spec.mean = get_vector(obj.at("mean"), "target.mean");
    spec.sigma = get_matrix(obj.at("sigma"), "target.sigma");
  } else if (spec.family == "gmm") {
    require_keys(obj, "target.", {"family", "weights", "means", "sigmas"});
    if (!obj.contains("weights") || !obj.contains("means") || !obj.contains("sigmas"))
      config_error("gmm target needs 'target.weights', 'target.means', 'target.sigmas'");
    spec.weights = get_double_list(obj.at("weights"), "target.weights");
    for (size_t j = 0; j < obj.at("means").size(); ++j)
      spec.means.push_back(get_vector(obj.at("means")[j], "target.means"));
    for (size_t j = 0; j < obj.at("sigmas").size(); ++j)
      spec.sigmas.push_back(get_matrix(obj.at("sigmas")[j], "target.sigmas"));
  } else if (spec.family == "skew_normal") {
    require_keys(obj, "target.", {"family", "location", "scale", "shape"});
    spec.locations = {get_number(obj, "target.", "location", 0.0)};
    spec.scales = {get_number(obj, "target.", "scale", 1.0)};
    spec.shapes = {get_number(obj, "target.", "shape", 0.0)};
  } else if (spec.family == "skew_gmm") {
    require_keys(obj, "target.", {"family", "weights", "locations", "scales", "shapes"});
    if (!obj.contains("weights") || !obj.contains("locations") || !obj.contains("scales") ||
        !obj.contains("shapes"))
      config_error("skew_gmm target needs weights, locations, scales, shapes");
    spec.weights = get_double_list(obj.at("weights"), "target.weights");
    spec.locations = get_double_list(obj.at("locations"), "target.locations");
    spec.scales = get_double_list(obj.at("scales"), "target.scales");
    spec.shapes = get_double_list(obj.at("shapes"), "target.shapes");
  } else {
    config_error("unknown target family '" + spec.family + "'");
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception &e) {
    config_error("invalid JSON in " + path + ": " + e.what());
  }
  require_keys(doc, "", {"target", "methods", "seeds", "out_dir", "eval_steps", "warm",
                         "policy", "pretrain", "rlmh", "arwmh", "amala", "reference"});

  ExperimentConfig cfg;
  if (!doc.contains("target")) config_error("missing key 'target'");
  cfg.target = parse_target(doc.at("target"));

  if (doc.contains("methods")) {
    cfg.methods.clear();
    for (const auto &m : doc.at("methods")) {
      const std::string name = m.get<std::string>();
      if (name != "rlmh" && name != "arwmh" && name != "amala")
        config_error("unknown method '" + name + "'");
      cfg.methods.push_back(name);
    }
    if (cfg.methods.empty()) config_error("'methods' must not be empty");
  }
  if (doc.contains("seeds")) {
    cfg.seeds.clear();
    for (const auto &s : doc.at("seeds")) {
      if (!s.is_number_unsigned()) config_error("'seeds' must hold non-negative integers");
      cfg.seeds.push_back(s.get<unsigned long>());
    }
    if (cfg.seeds.empty()) config_error("'seeds' must not be empty");
  }
  if (doc.contains("out_dir")) cfg.out_dir = doc.at("out_dir").get<std::string>();
  cfg.eval_steps = get_count(doc, "", "eval_steps", cfg.eval_steps);

  if (doc.contains("warm")) {
    const json &w = doc.at("warm");
    require_keys(w, "warm.", {"steps", "beta"});
    cfg.warm.steps = get_count(w, "warm.", "steps", cfg.warm.steps, 9);
    cfg.warm.beta = get_number(w, "warm.", "beta", cfg.warm.beta);
  }
  if (doc.contains("policy")) {
    const json &p = doc.at("policy");
    require_keys(p, "policy.", {"hidden", "radius"});
    cfg.policy.hidden = static_cast<int>(get_count(p, "policy.", "hidden", cfg.policy.hidden));
    cfg.policy.radius = get_number(p, "policy.", "radius", cfg.policy.radius);
    if (!(cfg.policy.radius > 0.0)) config_error("'policy.radius' must be positive");
  }
  if (doc.contains("pretrain")) {
    const json &p = doc.at("pretrain");
    require_keys(p, "pretrain.", {"max_epochs", "val_threshold", "lr", "val_fraction"});
    cfg.pretrain.max_epochs =
        static_cast<int>(get_count(p, "pretrain.", "max_epochs", cfg.pretrain.max_epochs, 0));
    cfg.pretrain.val_threshold =
        get_number(p, "pretrain.", "val_threshold", cfg.pretrain.val_threshold);
    cfg.pretrain.lr = get_number(p, "pretrain.", "lr", cfg.pretrain.lr);
    cfg.pretrain.val_fraction =
        get_number(p, "pretrain.", "val_fraction", cfg.pretrain.val_fraction);
    if (!(cfg.pretrain.val_fraction > 0.0 && cfg.pretrain.val_fraction < 1.0))
      config_error("'pretrain.val_fraction' must lie in (0, 1)");
  }
  if (doc.contains("rlmh")) {
    const json &r = doc.at("rlmh");
    require_keys(r, "rlmh.", {"episodes", "steps_per_episode", "clip_tau", "schedule", "ddpg"});
    cfg.rlmh.episodes = static_cast<int>(get_count(r, "rlmh.", "episodes", cfg.rlmh.episodes));
    cfg.rlmh.steps_per_episode = static_cast<int>(
        get_count(r, "rlmh.", "steps_per_episode", cfg.rlmh.steps_per_episode));
    cfg.rlmh.clip_tau = get_number(r, "rlmh.", "clip_tau", cfg.rlmh.clip_tau);
    if (r.contains("schedule")) {
      const json &s = r.at("schedule");
      require_keys(s, "rlmh.schedule.", {"mode", "alpha0", "kappa"});
      if (s.contains("mode")) {
        const std::string mode = s.at("mode").get<std::string>();
        if (mode == "theory") cfg.rlmh.schedule.mode = ScheduleMode::theory;
        else if (mode == "practice") cfg.rlmh.schedule.mode = ScheduleMode::practice;
        else config_error("'rlmh.schedule.mode' must be 'theory' or 'practice'");
      }
      cfg.rlmh.schedule.alpha0 =
          get_number(s, "rlmh.schedule.", "alpha0", cfg.rlmh.schedule.alpha0);
      cfg.rlmh.schedule.kappa =
          get_number(s, "rlmh.schedule.", "kappa", cfg.rlmh.schedule.kappa);
    }
    if (r.contains("ddpg")) {
      const json &d = r.at("ddpg");
      require_keys(d, "rlmh.ddpg.",
                   {"discount", "batch_size", "critic_lr", "tame", "capacity",
                    "critic_hidden", "critic_lr_cap"});
      cfg.rlmh.ddpg.discount = get_number(d, "rlmh.ddpg.", "discount", cfg.rlmh.ddpg.discount);
      cfg.rlmh.ddpg.batch_size =
          static_cast<int>(get_count(d, "rlmh.ddpg.", "batch_size", cfg.rlmh.ddpg.batch_size));
      cfg.rlmh.ddpg.critic_lr = get_number(d, "rlmh.ddpg.", "critic_lr", cfg.rlmh.ddpg.critic_lr);
      cfg.rlmh.ddpg.tame = get_number(d, "rlmh.ddpg.", "tame", cfg.rlmh.ddpg.tame);
      cfg.rlmh.ddpg.capacity = get_count(d, "rlmh.ddpg.", "capacity", cfg.rlmh.ddpg.capacity);
      cfg.rlmh.ddpg.critic_hidden = static_cast<int>(
          get_count(d, "rlmh.ddpg.", "critic_hidden", cfg.rlmh.ddpg.critic_hidden));
      if (d.contains("critic_lr_cap")) {
        if (!d.at("critic_lr_cap").is_boolean())
          config_error("'rlmh.ddpg.critic_lr_cap' must be a boolean");
        cfg.rlmh.ddpg.critic_lr_cap = d.at("critic_lr_cap").get<bool>();
      }
    }
  }
  if (doc.contains("arwmh")) {
    const json &a = doc.at("arwmh");
    require_keys(a, "arwmh.", {"steps", "beta"});
    cfg.arwmh_steps = get_count(a, "arwmh.", "steps", cfg.arwmh_steps);
    cfg.arwmh_beta = get_number(a, "arwmh.", "beta", cfg.arwmh_beta);
  }
  if (doc.contains("amala")) {
    const json &a = doc.at("amala");
    require_keys(a, "amala.",
                 {"epsilon0", "blend", "epochs", "warm_epoch_len", "final_epoch_len",
                  "target_accept"});
    cfg.amala.epsilon0 = get_number(a, "amala.", "epsilon0", cfg.amala.epsilon0);
    cfg.amala.blend = get_number(a, "amala.", "blend", cfg.amala.blend);
    cfg.amala.epochs = static_cast<int>(get_count(a, "amala.", "epochs", cfg.amala.epochs));
    cfg.amala.warm_epoch_len = get_count(a, "amala.", "warm_epoch_len", cfg.amala.warm_epoch_len);
    cfg.amala.final_epoch_len =
        get_count(a, "amala.", "final_epoch_len", cfg.amala.final_epoch_len);
    cfg.amala.target_accept = get_number(a, "amala.", "target_accept", cfg.amala.target_accept);
  }
  if (doc.contains("reference")) {
    const json &r = doc.at("reference");
    require_keys(r, "reference.", {"iid_draws", "path"});
    cfg.reference.iid_draws = get_count(r, "reference.", "iid_draws", cfg.reference.iid_draws);
    if (r.contains("path")) cfg.reference.path = r.at("path").get<std::string>();
  }
  return cfg;
}

void apply_preset(ExperimentConfig &config, const std::string &preset) {
  if (preset == "paper") {
    config.warm.steps = 10000;
    config.rlmh.episodes = 100;
    config.rlmh.steps_per_episode = 500;
    config.arwmh_steps = 60000;
    config.amala.epochs = 10;
    config.amala.warm_epoch_len = 1000;
    config.amala.final_epoch_len = 51000;
    config.eval_steps = 5000;
    config.reference.iid_draws = 10000;
  } else if (preset == "smoke") {
    config.warm.steps = 1000;
    config.rlmh.episodes = 10;
    config.rlmh.steps_per_episode = 500;
    config.arwmh_steps = 6000;
    config.amala.epochs = 10;
    config.amala.warm_epoch_len = 100;
    config.amala.final_epoch_len = 5100;
    config.eval_steps = 500;
    config.reference.iid_draws = 1000;
  } else {
    throw std::runtime_error("unknown preset '" + preset + "' (expected smoke or paper)");
  }
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string file_hash(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("file_hash: cannot open " + path);
  std::uint64_t h = 14695981039346656037ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const auto n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char out[32];
  std::snprintf(out, sizeof out, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return out;
}

namespace {

json config_to_json(const ExperimentConfig &c) {
  json t;
  t["family"] = c.target.family;
  if (c.target.family == "gaussian") {
    t["mean"] = std::vector<double>(c.target.mean.begin(), c.target.mean.end());
    std::vector<std::vector<double>> sigma;
    for (Eigen::Index i = 0; i < c.target.sigma.rows(); ++i)
      sigma.emplace_back(c.target.sigma.row(i).begin(), c.target.sigma.row(i).end());
    t["sigma"] = sigma;
  } else if (c.target.family == "gmm") {
    t["weights"] = c.target.weights;
    std::vector<std::vector<double>> means;
    for (const Vector &m : c.target.means) means.emplace_back(m.begin(), m.end());
    t["means"] = means;
    std::vector<std::vector<std::vector<double>>> sigmas;
    for (const Matrix &s : c.target.sigmas) {
      std::vector<std::vector<double>> rows;
      for (Eigen::Index i = 0; i < s.rows(); ++i)
        rows.emplace_back(s.row(i).begin(), s.row(i).end());
      sigmas.push_back(std::move(rows));
    }
    t["sigmas"] = sigmas;
  } else if (c.target.family == "skew_normal") {
    t["location"] = c.target.locations.at(0);
    t["scale"] = c.target.scales.at(0);
    t["shape"] = c.target.shapes.at(0);
  } else {
    t["weights"] = c.target.weights;
    t["locations"] = c.target.locations;
    t["scales"] = c.target.scales;
    t["shapes"] = c.target.shapes;
  }

  json doc;
  doc["target"] = t;
  doc["methods"] = c.methods;
  doc["seeds"] = c.seeds;
  doc["out_dir"] = c.out_dir;
  doc["eval_steps"] = c.eval_steps;
  doc["warm"] = {{"steps", c.warm.steps}, {"beta", c.warm.beta}};
  doc["policy"] = {{"hidden", c.policy.hidden}, {"radius", c.policy.radius}};
  doc["pretrain"] = {{"max_epochs", c.pretrain.max_epochs},
                     {"val_threshold", c.pretrain.val_threshold},
                     {"lr", c.pretrain.lr},
                     {"val_fraction", c.pretrain.val_fraction}};
  doc["rlmh"] = {
      {"episodes", c.rlmh.episodes},
      {"steps_per_episode", c.rlmh.steps_per_episode},
      {"clip_tau", c.rlmh.clip_tau},
      {"schedule",
       {{"mode", c.rlmh.schedule.mode == ScheduleMode::theory ? "theory" : "practice"},
        {"alpha0", c.rlmh.schedule.alpha0},
        {"kappa", c.rlmh.schedule.kappa}}},
      {"ddpg",
       {{"discount", c.rlmh.ddpg.discount},
        {"batch_size", c.rlmh.ddpg.batch_size},
        {"critic_lr", c.rlmh.ddpg.critic_lr},
        {"tame", c.rlmh.ddpg.tame},
        {"capacity", c.rlmh.ddpg.capacity},
        {"critic_hidden", c.rlmh.ddpg.critic_hidden},
        {"critic_lr_cap", c.rlmh.ddpg.critic_lr_cap}}}};
  doc["arwmh"] = {{"steps", c.arwmh_steps}, {"beta", c.arwmh_beta}};
  doc["amala"] = {{"epsilon0", c.amala.epsilon0},
                  {"blend", c.amala.blend},
                  {"epochs", c.amala.epochs},
                  {"warm_epoch_len", c.amala.warm_epoch_len},
                  {"final_epoch_len", c.amala.final_epoch_len},
                  {"target_accept", c.amala.target_accept}};
  doc["reference"] = {{"iid_draws", c.reference.iid_draws}, {"path", c.reference.path}};
  return doc;
}

void write_path_csv(const std::string &path, const Matrix &states,
                    const std::vector<int> &accepts, const std::vector<double> &rewards) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "step";
  for (Eigen::Index j = 0; j < states.cols(); ++j) out << ",x" << j;
  out << ",accept,reward\n";
  // Row i describes step i: the state after it, its accept flag, its reward.
  for (size_t i = 0; i < accepts.size(); ++i) {
    out << (i + 1);
    for (Eigen::Index j = 0; j < states.cols(); ++j)
      out << ',' << format_g17(states(static_cast<Eigen::Index>(i) + 1, j));
    out << ',' << accepts[i] << ',' << format_g17(rewards.empty() ? 0.0 : rewards[i]) << "\n";
  }
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

void write_reward_csv(const std::string &path, const RlmhResult &res) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "step,reward,log_alpha,delta_theta_norm\n";
  for (size_t i = 0; i < res.rewards.size(); ++i)
    out << (i + 1) << ',' << format_g17(res.rewards[i]) << ',' << format_g17(res.log_alphas[i])
        << ',' << format_g17(res.step_norms[i]) << "\n";
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

void write_metrics_csv(const std::string &path, const std::vector<MetricRow> &rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "method,target,seed,esjd,mmd,acceptance_rate,lengthscale\n";
  for (const MetricRow &r : rows)
    out << r.method << ',' << r.target_label << ',' << r.seed_label << ','
        << format_g17(r.esjd) << ',' << format_g17(r.mmd) << ','
        << format_g17(r.acceptance) << ',' << format_g17(r.lengthscale) << "\n";
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

struct EvalArtifacts {
  Matrix path;  // (n+1) x d
  std::vector<int> accepts;
  std::vector<double> rewards;
};

MetricRow measure(const std::string &method, const std::string &target_label,
                  const std::string &seed_label, const EvalArtifacts &eval,
                  const Matrix &reference, double lengthscale) {
  MetricRow row;
  row.method = method;
  row.target_label = target_label;
  row.seed_label = seed_label;
  row.esjd = esjd(eval.path);
  row.mmd = mmd(eval.path.bottomRows(eval.path.rows() - 1), reference, lengthscale);
  row.acceptance = acceptance_rate(eval.accepts);
  row.lengthscale = lengthscale;
  return row;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig &config) {
  fs::create_directories(config.out_dir);
  const Target target = make_target(config.target);

  // One reference standard shared by every method and seed, so MMD values
  // are comparable across rows. Fixed generator: the reference is part of
  // the evaluation protocol, not of any run's randomness.
  Matrix reference;
  if (!config.reference.path.empty()) {
    const ReferenceSample ref = load_reference_samples(config.reference.path);
    if (ref.points.cols() != target.dim)
      throw std::runtime_error("reference samples have dimension " +
                               std::to_string(ref.points.cols()) + ", target has " +
                               std::to_string(target.dim));
    reference = ref.points;
  } else {
    Rng ref_rng(0x9e3779b97f4a7c15ULL);
    reference = sample_iid(config.target, config.reference.iid_draws, ref_rng);
  }
  const double lengthscale = median_heuristic(reference);

  json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["config"] = config_to_json(config);
  manifest["seeds"] = config.seeds;
  manifest["runs"] = json::array();

  std::vector<MetricRow> rows;
  for (const std::string &method : config.methods) {
    std::vector<MetricRow> seed_rows;
    for (unsigned long seed : config.seeds) {
      Rng rng(seed);
      const auto t_start = std::chrono::steady_clock::now();
      const std::string stem =
          config.out_dir + "/" + method + "_seed" + std::to_string(seed);

      json entry;
      entry["method"] = method;
      entry["seed"] = seed;
      EvalArtifacts eval;

      if (method == "rlmh") {
        const WarmStart warm = warm_start(target, config.warm.steps, config.warm.beta, rng);
        Policy policy =
            make_policy(warm.mean, warm.sigma, config.policy.hidden, config.policy.radius);
        const PretrainResult pre = pretrain(policy, warm.samples, config.pretrain, rng);
        RlmhConfig rc = config.rlmh;
        rc.eval_steps = config.eval_steps;
        const RlmhResult res = rlmh_run(rc, target, warm, policy, rng);

        eval.path = res.eval.path;
        eval.accepts = res.eval.accepts;
        eval.rewards = res.eval.rewards;
        write_reward_csv(stem + "_rewards.csv", res);
        save_policy(res.policy, stem + "_policy.json");
        entry["pretrain"] = {{"best_val_loss", pre.best_val_loss},
                             {"final_val_loss", pre.final_val_loss},
                             {"epochs_run", pre.epochs_run}};
        entry["episode_mean_reward"] = res.episode_mean_reward;
        entry["clip_tau"] = res.clip_tau;
        entry["files"]["rewards"] = file_hash(stem + "_rewards.csv");
        entry["files"]["policy"] = file_hash(stem + "_policy.json");
      } else if (method == "arwmh") {
        const ArwmhRun adaptive =
            arwmh_run(target, config.arwmh_steps, config.arwmh_beta, rng);
        const ArwmhRun frozen = arwmh_run(target, config.eval_steps, config.arwmh_beta, rng,
                                          &adaptive.final_state, false);
        eval.path = frozen.path;
        eval.accepts = frozen.accepts;
      } else if (method == "amala") {
        const AmalaRun adaptive = amala_run(config.amala, target, rng);
        const CovarianceFactor frozen_factor = factorize(adaptive.final_sigma);
        const MalaRun frozen = mala_run(target, adaptive.final_epsilon, frozen_factor,
                                        adaptive.final_x, config.eval_steps, rng);
        eval.path = frozen.path;
        eval.accepts = frozen.accepts;
        entry["final_epsilon"] = adaptive.final_epsilon;
        entry["epoch_accept_rates"] = adaptive.epoch_accept_rates;
      } else {
        throw std::runtime_error("unknown method '" + method + "'");
      }

      write_path_csv(stem + "_path.csv", eval.path, eval.accepts, eval.rewards);
      entry["files"]["path"] = file_hash(stem + "_path.csv");

      const MetricRow row = measure(method, target.label, std::to_string(seed), eval,
                                    reference, lengthscale);
      entry["metrics"] = {{"esjd", row.esjd},
                          {"mmd", row.mmd},
                          {"acceptance_rate", row.acceptance},
                          {"lengthscale", row.lengthscale}};
      entry["wall_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      manifest["runs"].push_back(entry);
      seed_rows.push_back(row);
      rows.push_back(row);
    }

    // Aggregate mean and standard error over seeds for this method.
    const auto k = static_cast<double>(seed_rows.size());
    MetricRow mean_row, se_row;
    mean_row.method = se_row.method = method;
    mean_row.target_label = se_row.target_label = target.label;
    mean_row.seed_label = "mean";
    se_row.seed_label = "se";
    mean_row.lengthscale = lengthscale;
    auto aggregate = [&](auto field) {
      double mean = 0.0;
      for (const MetricRow &r : seed_rows) mean += r.*field;
      mean /= k;
      double var = 0.0;
      for (const MetricRow &r : seed_rows) var += (r.*field - mean) * (r.*field - mean);
      const double se = seed_rows.size() > 1 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
      return std::make_pair(mean, se);
    };
    std::tie(mean_row.esjd, se_row.esjd) = aggregate(&MetricRow::esjd);
    std::tie(mean_row.mmd, se_row.mmd) = aggregate(&MetricRow::mmd);
    std::tie(mean_row.acceptance, se_row.acceptance) = aggregate(&MetricRow::acceptance);
    rows.push_back(mean_row);
    rows.push_back(se_row);
    manifest["aggregate"].push_back(
        {{"method", method},
         {"esjd_mean", mean_row.esjd}, {"esjd_se", se_row.esjd},
         {"mmd_mean", mean_row.mmd}, {"mmd_se", se_row.mmd},
         {"acceptance_mean", mean_row.acceptance}, {"acceptance_se", se_row.acceptance},
         {"lengthscale", lengthscale}});
  }

  ExperimentReport report;
  report.metrics_path = config.out_dir + "/metrics.csv";
  write_metrics_csv(report.metrics_path, rows);
  manifest["files"] = {{"metrics", file_hash(report.metrics_path)}};

  report.manifest_path = config.out_dir + "/manifest.json";
  std::ofstream mf(report.manifest_path);
  if (!mf) throw std::runtime_error("cannot write " + report.manifest_path);
  mf << manifest.dump(2) << "\n";
  if (!mf.good()) throw std::runtime_error("write failed for " + report.manifest_path);
  report.rows = std::move(rows);
  return report;
}

GridAxis parse_grid_axis(const std::string &text) {
  GridAxis axis;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::runtime_error("grid axis '" + text + "' must look like first:last:count");
  try {
    axis.first = std::stod(text.substr(0, c1));
    axis.last = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    axis.count = std::stol(text.substr(c2 + 1));
  } catch (const std::exception &) {
    throw std::runtime_error("grid axis '" + text + "' must hold numbers");
  }
  if (axis.count < 1) throw std::runtime_error("grid axis '" + text + "' needs count >= 1");
  return axis;
}

namespace {

std::vector<double> linspace(const GridAxis &axis) {
  std::vector<double> pts(axis.count);
  if (axis.count == 1) {
    pts[0] = axis.first;
    return pts;
  }
  const double step = (axis.last - axis.first) / static_cast<double>(axis.count - 1);
  for (long i = 0; i < axis.count; ++i) pts[i] = axis.first + step * static_cast<double>(i);
  return pts;
}

}  // namespace

void emit_policy_slice(const Policy &policy, const std::vector<GridAxis> &axes,
                       const std::string &out_path) {
  const auto d = policy.center.size();
  if (axes.size() != static_cast<size_t>(d))
    throw std::runtime_error("policy slice: checkpoint dimension " + std::to_string(d) +
                             " needs as many grid axes, got " + std::to_string(axes.size()));
  if (d != 1 && d != 2)
    throw std::runtime_error("policy slice: only 1-D and 2-D policies are supported");

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  Vector x(d);
  if (d == 1) {
    out << "x,phi\n";
    for (double v : linspace(axes[0])) {
      x(0) = v;
      out << format_g17(v) << ',' << format_g17(phi_map(policy, x)(0)) << "\n";
    }
  } else {
    out << "x0,x1,phi0,phi1\n";
    for (double a : linspace(axes[0]))
      for (double b : linspace(axes[1])) {
        x(0) = a;
        x(1) = b;
        const Vector phi = phi_map(policy, x);
        out << format_g17(a) << ',' << format_g17(b) << ',' << format_g17(phi(0)) << ','
            << format_g17(phi(1)) << "\n";
      }
  }
  if (!out.good()) throw std::runtime_error("write failed for " + out_path);
}

}  // namespace rlmh

#ifndef RLMH_EXPERIMENT_HPP
#define RLMH_EXPERIMENT_HPP

#include <string>
#include <vector>

#include <rlmh/amala.hpp>
#include <rlmh/arwmh.hpp>
#include <rlmh/policy.hpp>
#include <rlmh/rlmh.hpp>
#include <rlmh/target.hpp>
#include <rlmh/types.hpp>

namespace rlmh {

inline constexpr const char *kArtifactVersion = "0.1.0";

/**
 * Declarative description of a built-in target family, as configs name them.
 * family is one of gaussian, gmm, skew_normal, skew_gmm.
 */
struct TargetSpec {
  std::string family;
  Vector mean;                 // gaussian
  Matrix sigma;                // gaussian
  std::vector<double> weights; // mixtures
  std::vector<Vector> means;   // gmm
  std::vector<Matrix> sigmas;  // gmm
  std::vector<double> locations, scales, shapes;  // skew families
  int dim() const;
};

Target make_target(const TargetSpec &spec);

/// i.i.d. draws from the spec'd distribution, one row per sample.
Matrix sample_iid(const TargetSpec &spec, long n, Rng &rng);

struct WarmConfig {
  long steps = 10000;
  double beta = 0.6;
};

struct PolicyConfig {
  int hidden = 32;
  double radius = 10.0;
};

struct ReferenceConfig {
  long iid_draws = 10000;  // used when path is empty
  std::string path;        // CSV of reference samples
};

struct ExperimentConfig {
  TargetSpec target;
  std::vector<std::string> methods = {"rlmh"};
  std::vector<unsigned long> seeds = {1};
  std::string out_dir = "runs";
  long eval_steps = 5000;
  WarmConfig warm;
  PolicyConfig policy;
  PretrainConfig pretrain;
  RlmhConfig rlmh;
  long arwmh_steps = 60000;
  double arwmh_beta = 0.6;
  AmalaConfig amala = [] {
    AmalaConfig a;
    a.final_epoch_len = 51000;  // keeps the adaptive total at 6e4
    return a;
  }();
  ReferenceConfig reference;
};

/**
 * Parses a JSON experiment config. Every unknown key is rejected with its
 * dotted path; structural and range errors carry the offending key.
 */
ExperimentConfig parse_config(const std::string &path);

/// Scales iteration counts: "smoke" is a 10% desk run, "paper" the full run.
void apply_preset(ExperimentConfig &config, const std::string &preset);

struct MetricRow {
  std::string method;
  std::string target_label;
  std::string seed_label;  // seed number, "mean" or "se"
  double esjd = 0.0;
  double mmd = 0.0;
  double acceptance = 0.0;
  double lengthscale = 0.0;
};

struct ExperimentReport {
  std::string manifest_path;
  std::string metrics_path;
  std::vector<MetricRow> rows;
};

/**
 * Runs every configured method for every seed, writes per-run sample paths,
 * reward traces and policy checkpoints, the metric table with per-seed and
 * mean/standard-error rows, and a manifest carrying the config echo, version,
 * per-episode mean rewards and a content hash per emitted file.
 */
ExperimentReport run_experiment(const ExperimentConfig &config);

/**
 * Evaluation grid for a stored policy: axes of the form first:last:count.
 * One axis writes x, phi(x); two axes write the cartesian product
 * x0, x1, phi0, phi1. The checkpoint dimension must match the axis count.
 */
struct GridAxis {
  double first = 0.0;
  double last = 0.0;
  long count = 0;
};

GridAxis parse_grid_axis(const std::string &text);

void emit_policy_slice(const Policy &policy, const std::vector<GridAxis> &axes,
                       const std::string &out_path);

/// FNV-1a 64-bit content hash of a file, as "fnv1a64:<16 hex digits>".
std::string file_hash(const std::string &path);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

}  // namespace rlmh

#endif

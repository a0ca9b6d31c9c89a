#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mhfc/dataio.hpp"
#include "mhfc/random.hpp"
#include "mhfc/subspace.hpp"
#include "mhfc/summary.hpp"

namespace mhfc {

// One sampled task: disjoint support / unlabeled / query indices into a
// FeatureDataset, labels remapped to 0..C-1 in class-draw order. True
// unlabeled labels are never stored, so no runner can read them.
struct Episode {
  int way = 5;
  int shot = 1;
  int n_query_per_class = 15;
  int n_unlabeled_per_class = 0;
  std::vector<int> support_idx;
  std::vector<int> unlabeled_idx;
  std::vector<int> query_idx;
  std::vector<int> support_labels;
  std::vector<int> query_labels;
};

// Sampling shape of an episode.
struct EpisodeSpec {
  int way = 5;
  int shot = 1;
  int n_query = 15;
  int n_unlabeled = 0;
};

enum class Setting { Inductive, Transductive, Semi };

Setting setting_from_string(const std::string& s);
std::string setting_to_string(Setting s);

constexpr long long kBudgetAll = -1;

struct EpisodeConfig {
  Setting setting = Setting::Inductive;
  Method method = Method::LE;
  int dim2 = 5;
  int k_neighbors = 0;  // 0 = auto: max(2, M/10)
  double mu = 1.0;
  double eta = 1.4;
  long long pseudo_label_budget = kBudgetAll;
  std::optional<double> confidence_floor;  // disabled by default
  bool unit_norm = false;
  bool refit_subspace = false;  // accepted but a structural no-op
  std::optional<std::vector<double>> fixed_weights;  // bypass solve_weights
  std::optional<std::vector<int>> use_heads;  // 0-based head subset
};

struct PseudoLabelEvent {
  int dataset_index = 0;
  int label = 0;
  double confidence = 0.0;
};

struct EpisodeResult {
  double accuracy = 0.0;
  std::vector<int> predictions;          // per query, 0..C-1
  std::vector<PseudoLabelEvent> trace;   // semi/transductive absorptions
};

// Uniform class choice without replacement, then per class uniform sample
// choice without replacement, partitioned support -> unlabeled -> query in
// draw order. Deterministic given the stream.
Episode sample_episode(const FeatureDataset& ds, const EpisodeSpec& spec,
                       RandomStream& rng);

EpisodeResult run_inductive(const FeatureDataset& ds, const Episode& ep,
                            const EpisodeConfig& cfg);
EpisodeResult run_semi(const FeatureDataset& ds, const Episode& ep,
                       const EpisodeConfig& cfg);
EpisodeResult run_transductive(const FeatureDataset& ds, const Episode& ep,
                               const EpisodeConfig& cfg);

// Dispatches on cfg.setting.
EpisodeResult run_episode(const FeatureDataset& ds, const Episode& ep,
                          const EpisodeConfig& cfg);

struct RunConfig {
  EpisodeSpec spec;
  EpisodeConfig episode;
  std::size_t episodes = 600;
  std::uint64_t seed = 42;
  int jobs = 1;
};

// Samples and evaluates `episodes` episodes (episode i uses the stream
// derived from (seed, i)); any jobs count yields identical results.
RunSummary run_experiment(const FeatureDataset& ds, const RunConfig& rc);

}  // namespace mhfc

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mhfc/fusion.hpp"
#include "mhfc/subspace.hpp"
#include "mhfc/summary.hpp"

#include <nlohmann/json_fwd.hpp>

namespace mhfc {

// Per-head feature matrices over a shared sample index, plus labels.
struct FeatureDataset {
  std::vector<HeadFeatures> heads;
  std::vector<std::string> head_names;
  std::vector<int> labels;                     // class id per sample
  std::map<int, std::vector<int>> class_index;  // class id -> sample indices

  int n_heads() const { return static_cast<int>(heads.size()); }
  int n_samples() const { return static_cast<int>(labels.size()); }
  int dim1() const {
    return heads.empty() ? 0 : static_cast<int>(heads[0].matrix.rows());
  }
  int n_classes() const { return static_cast<int>(class_index.size()); }
  std::vector<int> class_ids() const;  // ascending
};

// Seeded multi-head generator simulating distribution shift across heads:
// latent class means mu_c ~ N(0, class_separation^2 I); per head a small
// random rotation Q_h (Cayley map with plane angles ~ head_shift) and a
// shift b_h with ||b_h|| = head_shift; samples x = Q_h(mu_c + eps) + b_h
// with eps ~ N(0, noise_sigma^2 I) drawn fresh per (sample, head).
struct SynthConfig {
  int n_classes = 20;
  int samples_per_class = 100;
  int raw_dim = 64;
  int n_heads = 2;
  double class_separation = 1.0;
  double head_shift = 0.8;
  double noise_sigma = 0.6;
  std::uint64_t seed = 7;
};

FeatureDataset generate_synthetic(const SynthConfig& cfg);

// Manifest JSON: {"version":1,"labels":"labels.txt","heads":[{"name":..,
// "path":..}, ...]}; head paths relative to the manifest, .fvec or .csv.
FeatureDataset load_manifest(const std::filesystem::path& manifest_path);

// .fvec: magic "MHFC" (4D 48 46 43), u32 version=1, u32 n_samples, u32 dim,
// then float32 values sample-major, all little-endian.
Matrix read_fvec(const std::filesystem::path& path);
void write_fvec(const std::filesystem::path& path, const Matrix& features);

Matrix read_csv_head(const std::filesystem::path& path);

std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path,
                  const std::vector<int>& labels);

// Results JSON: {"config":{...},"per_episode":[...],"mean_accuracy":...,
// "ci95":...,"n_episodes":...,"elapsed_seconds":...}.
void write_results(const RunSummary& summary, const nlohmann::json& config,
                   const std::filesystem::path& path);

// Fused-feature CSV with header label,f0,...,f{dim3-1}.
void write_features(const CollaborativeFeatures& Z,
                    const std::vector<int>& labels,
                    const std::filesystem::path& path);

// Writes head<i>.fvec files, labels.txt and manifest.json into out_dir;
// returns the manifest path.
std::filesystem::path write_synth_dataset(const SynthConfig& cfg,
                                          const std::filesystem::path& out_dir);

}  // namespace mhfc

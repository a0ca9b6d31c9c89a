// mhfc — multi-head feature collaboration pipeline over episodic few-shot
// evaluation: run | synth | ablate | export-fused.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mhfc/attention.hpp"
#include "mhfc/dataio.hpp"
#include "mhfc/protocols.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunFlags {
  std::string manifest;
  std::string setting = "inductive";
  std::string method = "le";
  int dim2 = 5;
  int k_neighbors = 0;
  double mu = 1.0;
  double eta = 1.4;
  std::size_t episodes = 600;
  int way = 5;
  int shot = 1;
  int query = 15;
  int unlabeled = 0;
  long long budget = mhfc::kBudgetAll;
  double confidence_floor = 0.0;
  bool has_floor = false;
  std::uint64_t seed = 42;
  int jobs = 1;
  bool unit_norm = false;
  bool refit_subspace = false;
  std::string output;
};

void add_episode_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--manifest", f.manifest, "dataset manifest JSON")
      ->required();
  cmd->add_option("--setting", f.setting, "inductive|transductive|semi")
      ->check(CLI::IsMember({"inductive", "transductive", "semi"}));
  cmd->add_option("--method", f.method, "subspace method: none|pca|lle|le")
      ->check(CLI::IsMember({"none", "pca", "lle", "le"}));
  cmd->add_option("--dim2", f.dim2, "subspace target dimension (default 5)");
  cmd->add_option("--k-neighbors", f.k_neighbors,
                  "kNN graph size; 0 = auto max(2, M/10)");
  cmd->add_option("--mu", f.mu, "ridge regularizer (default 1.0)");
  cmd->add_option("--eta", f.eta, "weight regularizer (default 1.4)");
  cmd->add_option("--episodes", f.episodes, "episode count (default 600)");
  cmd->add_option("--way", f.way, "classes per episode (default 5)");
  cmd->add_option("--shot", f.shot, "support samples per class (default 1)");
  cmd->add_option("--query", f.query, "query samples per class (default 15)");
  cmd->add_option("--unlabeled", f.unlabeled,
                  "unlabeled samples per class (default 0)");
  cmd->add_option("--budget", f.budget,
                  "pseudo-label budget; -1 = absorb the whole pool");
  cmd->add_option("--confidence-floor", f.confidence_floor,
                  "stop absorbing below this raw max score")
      ->each([&f](const std::string&) { f.has_floor = true; });
  cmd->add_option("--seed", f.seed, "master seed (default 42)");
  cmd->add_option("--jobs", f.jobs,
                  "episode-level parallelism; results identical at any value");
  cmd->add_flag("--unit-norm", f.unit_norm,
                "unit-normalize each feature column before the transform");
  cmd->add_flag("--refit-subspace", f.refit_subspace,
                "reserved; the per-episode transform makes this a no-op");
}

mhfc::RunConfig to_run_config(const RunFlags& f) {
  mhfc::RunConfig rc;
  rc.spec.way = f.way;
  rc.spec.shot = f.shot;
  rc.spec.n_query = f.query;
  rc.spec.n_unlabeled = f.unlabeled;
  rc.episode.setting = mhfc::setting_from_string(f.setting);
  rc.episode.method = mhfc::method_from_string(f.method);
  rc.episode.dim2 = f.dim2;
  rc.episode.k_neighbors = f.k_neighbors;
  rc.episode.mu = f.mu;
  rc.episode.eta = f.eta;
  rc.episode.pseudo_label_budget = f.budget;
  if (f.has_floor) rc.episode.confidence_floor = f.confidence_floor;
  rc.episode.unit_norm = f.unit_norm;
  rc.episode.refit_subspace = f.refit_subspace;
  rc.episodes = f.episodes;
  rc.seed = f.seed;
  rc.jobs = f.jobs;
  return rc;
}

json config_echo(const RunFlags& f) {
  json c;
  c["manifest"] = f.manifest;
  c["setting"] = f.setting;
  c["method"] = f.method;
  c["dim2"] = f.dim2;
  c["k_neighbors"] = f.k_neighbors;
  c["mu"] = f.mu;
  c["eta"] = f.eta;
  c["episodes"] = f.episodes;
  c["way"] = f.way;
  c["shot"] = f.shot;
  c["query"] = f.query;
  c["unlabeled"] = f.unlabeled;
  c["budget"] = f.budget;
  if (f.has_floor)
    c["confidence_floor"] = f.confidence_floor;
  else
    c["confidence_floor"] = nullptr;
  c["seed"] = f.seed;
  c["jobs"] = f.jobs;
  c["unit_norm"] = f.unit_norm;
  c["refit_subspace"] = f.refit_subspace;
  return c;
}

void print_summary(const mhfc::RunSummary& s) {
  std::printf("accuracy: %.2f%% +/- %.2f%% over %zu episodes\n",
              100.0 * s.mean, 100.0 * s.ci95, s.n_episodes);
}

void warn_flags(const RunFlags& f) {
  if (f.setting == "semi" && f.unlabeled == 0)
    std::cerr << "warning: --setting semi with --unlabeled 0 behaves as "
                 "inductive\n";
  if (f.refit_subspace)
    std::cerr << "warning: --refit-subspace has no effect; the transform is "
                 "fit once per episode on the full feature set\n";
}

int cmd_run(const RunFlags& f) {
  warn_flags(f);
  const mhfc::FeatureDataset ds = mhfc::load_manifest(f.manifest);
  const mhfc::RunConfig rc = to_run_config(f);
  const mhfc::RunSummary summary = mhfc::run_experiment(ds, rc);
  print_summary(summary);
  if (!f.output.empty())
    mhfc::write_results(summary, config_echo(f), f.output);
  return 0;
}

struct AblateFlags {
  RunFlags run;
  std::string mode;
  std::string output = "ablate.csv";
};

int cmd_ablate(const AblateFlags& af) {
  const mhfc::FeatureDataset ds = mhfc::load_manifest(af.run.manifest);
  const mhfc::RunConfig base = to_run_config(af.run);

  std::vector<std::pair<std::string, mhfc::RunConfig>> variants;
  if (af.mode == "heads") {
    for (int h = 0; h < ds.n_heads(); ++h) {
      mhfc::RunConfig rc = base;
      rc.episode.use_heads = std::vector<int>{h};
      variants.emplace_back("head-" + std::to_string(h + 1), rc);
    }
    variants.emplace_back("fused", base);
  } else if (af.mode == "subspace") {
    for (const std::string m : {"none", "pca", "lle", "le"}) {
      mhfc::RunConfig rc = base;
      rc.episode.method = mhfc::method_from_string(m);
      variants.emplace_back(m, rc);
    }
  } else if (af.mode == "weights") {
    if (ds.n_heads() != 2)
      throw mhfc::InvalidConfig("ablate weights expects exactly 2 heads, got " +
                                std::to_string(ds.n_heads()));
    const double grid[5][2] = {
        {0.1, 0.9}, {0.3, 0.7}, {0.5, 0.5}, {0.7, 0.3}, {0.9, 0.1}};
    for (const auto& w : grid) {
      mhfc::RunConfig rc = base;
      rc.episode.fixed_weights = std::vector<double>{w[0], w[1]};
      char name[32];
      std::snprintf(name, sizeof(name), "fixed-%.1f-%.1f", w[0], w[1]);
      variants.emplace_back(name, rc);
    }
    variants.emplace_back("learned", base);
  } else if (af.mode == "unlabeled") {
    for (int u : {0, 5, 10, 20, 40}) {
      mhfc::RunConfig rc = base;
      rc.episode.setting = mhfc::Setting::Semi;
      rc.spec.n_unlabeled = u;
      variants.emplace_back("u-" + std::to_string(u), rc);
    }
  } else if (af.mode == "eta") {
    for (double e : {0.1, 0.5, 1.0, 1.4, 2.0, 5.0}) {
      mhfc::RunConfig rc = base;
      rc.episode.eta = e;
      char name[32];
      std::snprintf(name, sizeof(name), "eta-%.1f", e);
      variants.emplace_back(name, rc);
    }
  } else {
    throw mhfc::InvalidConfig("unknown ablate mode: " + af.mode);
  }

  std::FILE* out = std::fopen(af.output.c_str(), "w");
  if (!out) throw mhfc::IoError("cannot write " + af.output);
  std::fprintf(out, "variant,mean_accuracy,ci95,n_episodes\n");
  for (const auto& [name, rc] : variants) {
    const mhfc::RunSummary s = mhfc::run_experiment(ds, rc);
    std::fprintf(out, "%s,%.6f,%.6f,%zu\n", name.c_str(), s.mean, s.ci95,
                 s.n_episodes);
    std::printf("%-14s %.2f%% +/- %.2f%%\n", name.c_str(), 100.0 * s.mean,
                100.0 * s.ci95);
  }
  std::fclose(out);
  return 0;
}

struct FusedFlags {
  std::string manifest;
  std::string output;
  std::string method = "le";
  int dim2 = 5;
  int k_neighbors = 0;
  double mu = 1.0;
  double eta = 1.4;
  bool unit_norm = false;
};

// Whole-dataset collaborative embedding: every labeled sample acts as
// support for the per-head losses; intended for external plotting.
int cmd_export_fused(const FusedFlags& f) {
  const mhfc::FeatureDataset ds = mhfc::load_manifest(f.manifest);
  const int H = ds.n_heads();
  const int N = ds.n_samples();
  std::vector<mhfc::HeadFeatures> heads = ds.heads;
  if (f.unit_norm)
    for (auto& h : heads)
      for (int i = 0; i < N; ++i) {
        const double nrm = h.matrix.col(i).norm();
        if (nrm > 0.0) h.matrix.col(i) /= nrm;
      }
  const mhfc::Matrix X_exp = mhfc::expand_heads(heads, H);
  auto [model, emb] = mhfc::fit_transform(
      X_exp, mhfc::method_from_string(f.method), f.dim2, f.k_neighbors);
  const std::vector<mhfc::Matrix> P = mhfc::split_heads(emb, H, N);

  const std::vector<int> cids = ds.class_ids();
  std::vector<int> remapped(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const auto it = std::lower_bound(cids.begin(), cids.end(),
                                     ds.labels[static_cast<std::size_t>(i)]);
    remapped[static_cast<std::size_t>(i)] =
        static_cast<int>(it - cids.begin());
  }
  const mhfc::OneHotLabels Y =
      mhfc::OneHotLabels::from_labels(remapped, ds.n_classes());
  mhfc::HeadLossVector hl;
  hl.eta = f.eta;
  for (int h = 0; h < H; ++h)
    hl.losses.push_back(
        mhfc::head_loss(P[static_cast<std::size_t>(h)], Y, f.mu));
  const mhfc::SimplexVector omega = mhfc::solve_weights(hl);
  const mhfc::CollaborativeFeatures Z = mhfc::collaborate(P, omega);
  mhfc::write_features(Z, ds.labels, f.output);
  std::printf("wrote %d samples x %lld fused dims to %s\n", N,
              static_cast<long long>(Z.matrix.rows()), f.output.c_str());
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"multi-head feature collaboration for few-shot classification"};
  app.require_subcommand(1);

  RunFlags rf;
  CLI::App* run = app.add_subcommand("run", "evaluate episodes");
  add_episode_flags(run, rf);
  run->add_option("--output", rf.output, "results JSON path");

  mhfc::SynthConfig sc;
  std::string synth_dir;
  CLI::App* synth =
      app.add_subcommand("synth", "generate a synthetic multi-head dataset");
  synth->add_option("--output", synth_dir, "output directory")->required();
  synth->add_option("--classes", sc.n_classes, "class count (default 20)");
  synth->add_option("--per-class", sc.samples_per_class,
                    "samples per class (default 100)");
  synth->add_option("--dim", sc.raw_dim, "feature dimension (default 64)");
  synth->add_option("--heads", sc.n_heads, "head count (default 2)");
  synth->add_option("--separation", sc.class_separation,
                    "class-mean scale (default 1.0)");
  synth->add_option("--head-shift", sc.head_shift,
                    "per-head distortion magnitude (default 0.8)");
  synth->add_option("--noise", sc.noise_sigma,
                    "within-class noise sigma (default 0.6)");
  synth->add_option("--seed", sc.seed, "generator seed (default 7)");

  AblateFlags af;
  CLI::App* ablate = app.add_subcommand("ablate", "paired ablation sweeps");
  add_episode_flags(ablate, af.run);
  ablate->add_option("--mode", af.mode,
                     "heads|subspace|weights|unlabeled|eta")
      ->required()
      ->check(CLI::IsMember({"heads", "subspace", "weights", "unlabeled",
                             "eta"}));
  ablate->add_option("--output", af.output, "CSV path (default ablate.csv)");

  FusedFlags ff;
  CLI::App* fused = app.add_subcommand(
      "export-fused", "write whole-dataset collaborative features as CSV");
  fused->add_option("--manifest", ff.manifest, "dataset manifest JSON")
      ->required();
  fused->add_option("--output", ff.output, "CSV path")->required();
  fused->add_option("--method", ff.method, "none|pca|lle|le")
      ->check(CLI::IsMember({"none", "pca", "lle", "le"}));
  fused->add_option("--dim2", ff.dim2, "subspace target dimension");
  fused->add_option("--k-neighbors", ff.k_neighbors, "0 = auto");
  fused->add_option("--mu", ff.mu, "ridge regularizer");
  fused->add_option("--eta", ff.eta, "weight regularizer");
  fused->add_flag("--unit-norm", ff.unit_norm, "unit-normalize columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (run->parsed()) return cmd_run(rf);
  if (synth->parsed()) {
    const fs::path mpath = mhfc::write_synth_dataset(sc, synth_dir);
    std::printf("wrote %s\n", mpath.c_str());
    return 0;
  }
  if (ablate->parsed()) return cmd_ablate(af);
  if (fused->parsed()) return cmd_export_fused(ff);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const mhfc::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const mhfc::InsufficientClasses& e) {
    std::cerr << "config error (InsufficientClasses): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::InsufficientSamples& e) {
    std::cerr << "config error (InsufficientSamples): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::BudgetExceedsPool& e) {
    std::cerr << "config error (BudgetExceedsPool): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::NonPositiveMu& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const mhfc::ManifestParseError& e) {
    std::cerr << "config error (ManifestParseError): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::HeadFileMissing& e) {
    std::cerr << "config error (HeadFileMissing): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::SampleCountMismatch& e) {
    std::cerr << "config error (SampleCountMismatch): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::HeadDimMismatch& e) {
    std::cerr << "config error (HeadDimMismatch): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::BadMagic& e) {
    std::cerr << "config error (BadMagic): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::BadVersion& e) {
    std::cerr << "config error (BadVersion): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::NonFiniteData& e) {
    std::cerr << "config error (NonFiniteData): " << e.what() << '\n';
    return 2;
  } catch (const mhfc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#include "mhfc/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "mhfc/attention.hpp"
#include "mhfc/fusion.hpp"

namespace mhfc {

Setting setting_from_string(const std::string& s) {
  if (s == "inductive") return Setting::Inductive;
  if (s == "transductive") return Setting::Transductive;
  if (s == "semi") return Setting::Semi;
  throw InvalidConfig("unknown setting: " + s);
}

std::string setting_to_string(Setting s) {
  switch (s) {
    case Setting::Inductive: return "inductive";
    case Setting::Transductive: return "transductive";
    case Setting::Semi: return "semi";
  }
  return "?";
}

Episode sample_episode(const FeatureDataset& ds, const EpisodeSpec& spec,
                       RandomStream& rng) {
  if (spec.way < 1 || spec.shot < 1 || spec.n_query < 1 ||
      spec.n_unlabeled < 0)
    throw InvalidConfig("sample_episode: invalid episode shape");
  if (ds.n_classes() < spec.way)
    throw InsufficientClasses("need " + std::to_string(spec.way) +
                              " classes, dataset has " +
                              std::to_string(ds.n_classes()));
  const int per_class = spec.shot + spec.n_unlabeled + spec.n_query;
  for (const auto& [cid, idxs] : ds.class_index)
    if (static_cast<int>(idxs.size()) < per_class)
      throw InsufficientSamples("class " + std::to_string(cid) + " has " +
                                std::to_string(idxs.size()) +
                                " samples, need " + std::to_string(per_class));

  std::vector<int> classes = ds.class_ids();
  rng.partial_shuffle(classes, static_cast<std::size_t>(spec.way));
  Episode ep;
  ep.way = spec.way;
  ep.shot = spec.shot;
  ep.n_query_per_class = spec.n_query;
  ep.n_unlabeled_per_class = spec.n_unlabeled;
  for (int j = 0; j < spec.way; ++j) {
    std::vector<int> pool = ds.class_index.at(classes[j]);
    rng.partial_shuffle(pool, static_cast<std::size_t>(per_class));
    int t = 0;
    for (int i = 0; i < spec.shot; ++i, ++t) {
      ep.support_idx.push_back(pool[t]);
      ep.support_labels.push_back(j);
    }
    for (int i = 0; i < spec.n_unlabeled; ++i, ++t)
      ep.unlabeled_idx.push_back(pool[t]);
    for (int i = 0; i < spec.n_query; ++i, ++t) {
      ep.query_idx.push_back(pool[t]);
      ep.query_labels.push_back(j);
    }
  }
  return ep;
}

namespace {

SimplexVector weights_for(const std::vector<Matrix>& P,
                          const std::vector<int>& s_cols,
                          const std::vector<int>& s_labels, int way,
                          const EpisodeConfig& cfg) {
  const int H = static_cast<int>(P.size());
  if (cfg.fixed_weights) {
    if (static_cast<int>(cfg.fixed_weights->size()) != H)
      throw HeadCountMismatch("fixed weights: " +
                              std::to_string(cfg.fixed_weights->size()) +
                              " entries for " + std::to_string(H) + " heads");
    SimplexVector omega;
    omega.weights = Eigen::Map<const Vector>(cfg.fixed_weights->data(),
                                             static_cast<Eigen::Index>(H));
    if (!omega.valid())
      throw InvalidConfig("fixed weights must lie on the simplex");
    return omega;
  }
  const OneHotLabels Ys = OneHotLabels::from_labels(s_labels, way);
  HeadLossVector hl;
  hl.eta = cfg.eta;
  hl.losses.resize(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) {
    Matrix Ps(P[static_cast<std::size_t>(h)].rows(),
              static_cast<Eigen::Index>(s_cols.size()));
    for (std::size_t i = 0; i < s_cols.size(); ++i)
      Ps.col(static_cast<Eigen::Index>(i)) =
          P[static_cast<std::size_t>(h)].col(s_cols[i]);
    hl.losses[static_cast<std::size_t>(h)] = head_loss(Ps, Ys, cfg.mu);
  }
  return solve_weights(hl);
}

CollaborativeFeatures gather_collab(const std::vector<Matrix>& P,
                                    const std::vector<int>& cols,
                                    const SimplexVector& omega) {
  std::vector<Matrix> sub;
  sub.reserve(P.size());
  for (const Matrix& Ph : P) {
    Matrix s(Ph.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
      s.col(static_cast<Eigen::Index>(i)) = Ph.col(cols[i]);
    sub.push_back(std::move(s));
  }
  return collaborate(sub, omega);
}

}  // namespace

EpisodeResult run_episode(const FeatureDataset& ds, const Episode& ep,
                          const EpisodeConfig& cfg) {
  std::vector<int> head_ids;
  if (cfg.use_heads) {
    head_ids = *cfg.use_heads;
    for (int h : head_ids)
      if (h < 0 || h >= ds.n_heads())
        throw HeadCountMismatch("use_heads: head " + std::to_string(h) +
                                " out of range");
    if (head_ids.empty()) throw HeadCountMismatch("use_heads: empty");
  } else {
    head_ids.resize(static_cast<std::size_t>(ds.n_heads()));
    for (int h = 0; h < ds.n_heads(); ++h)
      head_ids[static_cast<std::size_t>(h)] = h;
  }
  const int H = static_cast<int>(head_ids.size());

  // Episode feature layout: [support | unlabeled (semi only) | query].
  const bool with_unlabeled = (cfg.setting == Setting::Semi);
  std::vector<int> cols = ep.support_idx;
  if (with_unlabeled)
    cols.insert(cols.end(), ep.unlabeled_idx.begin(), ep.unlabeled_idx.end());
  cols.insert(cols.end(), ep.query_idx.begin(), ep.query_idx.end());
  const int Ns = static_cast<int>(ep.support_idx.size());
  const int Nu = with_unlabeled ? static_cast<int>(ep.unlabeled_idx.size()) : 0;
  const int Nq = static_cast<int>(ep.query_idx.size());
  const int n_cols = static_cast<int>(cols.size());

  std::vector<HeadFeatures> eps_heads;
  eps_heads.reserve(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) {
    const Matrix& src = ds.heads[static_cast<std::size_t>(head_ids[h])].matrix;
    HeadFeatures hf;
    hf.head_index = h + 1;
    hf.matrix.resize(src.rows(), n_cols);
    for (int i = 0; i < n_cols; ++i) hf.matrix.col(i) = src.col(cols[i]);
    if (cfg.unit_norm)
      for (int i = 0; i < n_cols; ++i) {
        const double nrm = hf.matrix.col(i).norm();
        if (nrm > 0.0) hf.matrix.col(i) /= nrm;
      }
    eps_heads.push_back(std::move(hf));
  }

  // The transform is fit once on the full episode feature set; absorbed
  // samples' transformed features are looked up, never recomputed, so a
  // refit after absorption would reproduce the same embedding.
  const Matrix X_exp = expand_heads(eps_heads, H);
  auto [model, emb] = fit_transform(X_exp, cfg.method, cfg.dim2,
                                    cfg.k_neighbors);
  const std::vector<Matrix> P = split_heads(emb, H, n_cols);

  std::vector<int> s_cols(static_cast<std::size_t>(Ns));
  for (int i = 0; i < Ns; ++i) s_cols[static_cast<std::size_t>(i)] = i;
  std::vector<int> s_labels = ep.support_labels;

  std::vector<int> pool;
  long long budget = 0;
  if (cfg.setting == Setting::Semi) {
    for (int i = 0; i < Nu; ++i) pool.push_back(Ns + i);
    if (cfg.pseudo_label_budget == kBudgetAll)
      budget = Nu;
    else if (cfg.pseudo_label_budget > Nu)
      throw BudgetExceedsPool("budget " +
                              std::to_string(cfg.pseudo_label_budget) +
                              " exceeds unlabeled pool of " +
                              std::to_string(Nu));
    else
      budget = cfg.pseudo_label_budget;
  } else if (cfg.setting == Setting::Transductive) {
    for (int i = 0; i < Nq; ++i) pool.push_back(Ns + Nu + i);
    budget = (cfg.pseudo_label_budget == kBudgetAll)
                 ? Nq
                 : std::min<long long>(cfg.pseudo_label_budget, Nq);
  }

  EpisodeResult result;
  for (long long it = 0; it < budget && !pool.empty(); ++it) {
    const SimplexVector omega =
        weights_for(P, s_cols, s_labels, ep.way, cfg);
    const OneHotLabels Ys = OneHotLabels::from_labels(s_labels, ep.way);
    const RidgeClassifier Wz =
        fit_collaborative(gather_collab(P, s_cols, omega), Ys, cfg.mu);
    const auto [scores, labels] =
        classify(Wz, gather_collab(P, pool, omega));
    // The single most confident sample: highest maximum class score, ties
    // by lowest pool position.
    int best = 0;
    double best_conf = scores.col(0).maxCoeff();
    for (int j = 1; j < static_cast<int>(pool.size()); ++j) {
      const double conf = scores.col(j).maxCoeff();
      if (conf > best_conf) {
        best_conf = conf;
        best = j;
      }
    }
    if (cfg.confidence_floor && best_conf < *cfg.confidence_floor) break;
    const int col = pool[static_cast<std::size_t>(best)];
    const int pseudo = labels[static_cast<std::size_t>(best)];
    s_cols.push_back(col);
    s_labels.push_back(pseudo);
    pool.erase(pool.begin() + best);
    PseudoLabelEvent ev;
    ev.dataset_index = (cfg.setting == Setting::Semi)
                           ? ep.unlabeled_idx[static_cast<std::size_t>(col - Ns)]
                           : ep.query_idx[static_cast<std::size_t>(col - Ns - Nu)];
    ev.label = pseudo;
    ev.confidence = best_conf;
    result.trace.push_back(ev);
  }

  const SimplexVector omega = weights_for(P, s_cols, s_labels, ep.way, cfg);
  const OneHotLabels Ys = OneHotLabels::from_labels(s_labels, ep.way);
  const RidgeClassifier Wz =
      fit_collaborative(gather_collab(P, s_cols, omega), Ys, cfg.mu);
  std::vector<int> q_cols(static_cast<std::size_t>(Nq));
  for (int i = 0; i < Nq; ++i)
    q_cols[static_cast<std::size_t>(i)] = Ns + Nu + i;
  auto [scores, labels] = classify(Wz, gather_collab(P, q_cols, omega));
  result.predictions = std::move(labels);
  int correct = 0;
  for (std::size_t i = 0; i < result.predictions.size(); ++i)
    if (result.predictions[i] == ep.query_labels[i]) ++correct;
  result.accuracy =
      static_cast<double>(correct) / static_cast<double>(Nq);
  return result;
}

EpisodeResult run_inductive(const FeatureDataset& ds, const Episode& ep,
                            const EpisodeConfig& cfg) {
  if (cfg.setting != Setting::Inductive)
    throw InvalidConfig("run_inductive: cfg.setting must be inductive");
  return run_episode(ds, ep, cfg);
}

EpisodeResult run_semi(const FeatureDataset& ds, const Episode& ep,
                       const EpisodeConfig& cfg) {
  if (cfg.setting != Setting::Semi)
    throw InvalidConfig("run_semi: cfg.setting must be semi");
  return run_episode(ds, ep, cfg);
}

EpisodeResult run_transductive(const FeatureDataset& ds, const Episode& ep,
                               const EpisodeConfig& cfg) {
  if (cfg.setting != Setting::Transductive)
    throw InvalidConfig("run_transductive: cfg.setting must be transductive");
  return run_episode(ds, ep, cfg);
}

RunSummary aggregate(const std::vector<double>& accs) {
  if (accs.empty()) throw EmptyList("aggregate: no episode accuracies");
  RunSummary s;
  s.per_episode_accuracy = accs;
  s.n_episodes = accs.size();
  double sum = 0.0;
  for (double a : accs) sum += a;
  s.mean = sum / static_cast<double>(accs.size());
  if (accs.size() == 1) {
    s.ci95 = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double a : accs) ss += (a - s.mean) * (a - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(accs.size() - 1));
  s.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(accs.size()));
  return s;
}

RunSummary run_experiment(const FeatureDataset& ds, const RunConfig& rc) {
  if (rc.episodes < 1) throw InvalidConfig("run_experiment: episodes >= 1");
  // Surface sampling preconditions once, before any worker starts.
  {
    RandomStream probe(0);
    (void)sample_episode(ds, rc.spec, probe);
  }
  std::vector<double> accs(rc.episodes, 0.0);
  const auto t0 = std::chrono::steady_clock::now();
  auto work = [&](std::size_t i) {
    RandomStream rng = RandomStream::derived(rc.seed, i);
    const Episode ep = sample_episode(ds, rc.spec, rng);
    accs[i] = run_episode(ds, ep, rc.episode).accuracy;
  };
  const int jobs = std::max(1, rc.jobs);
  if (jobs == 1 || rc.episodes == 1) {
    for (std::size_t i = 0; i < rc.episodes; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= rc.episodes) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    const int n_threads =
        std::min<int>(jobs, static_cast<int>(rc.episodes));
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  const auto t1 = std::chrono::steady_clock::now();
  RunSummary summary = aggregate(accs);
  summary.elapsed_seconds =
      std::chrono::duration<double>(t1 - t0).count();
  return summary;
}

}  // namespace mhfc

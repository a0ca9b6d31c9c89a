#pragma once

#include <cstddef>
#include <vector>

namespace mhfc {

// Per-episode accuracies with mean and 95% confidence interval
// (1.96 * sample standard deviation / sqrt(E)).
struct RunSummary {
  std::vector<double> per_episode_accuracy;
  double mean = 0.0;
  double ci95 = 0.0;
  std::size_t n_episodes = 0;
  double elapsed_seconds = 0.0;
};

// EmptyList when accs is empty; a single episode reports ci95 = 0.
RunSummary aggregate(const std::vector<double>& accs);

}  // namespace mhfc

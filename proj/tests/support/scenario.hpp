#pragma once

#include "noisylab/dataset.hpp"
#include "noisylab/noise_model.hpp"
#include "noisylab/rng.hpp"
#include "noisylab/trainer.hpp"

namespace testing {

struct Scenario {
  noisylab::LabeledDataset train;  // clean labels
  noisylab::LabeledDataset test;
};

// Standardized blobs; the test split uses its own stream.
inline Scenario blob_scenario(std::size_t n_per_class, std::size_t test_per_class, int k, int d,
                              double separation, double spread, std::uint64_t seed) {
  Scenario s;
  s.train = noisylab::make_blobs(n_per_class, k, d, separation, spread, seed);
  s.test = noisylab::make_blobs(test_per_class, k, d, separation, spread,
                                noisylab::derive_seed(seed, 1));
  auto st = noisylab::Standardizer::fit(s.train.features);
  st.apply(s.train.features);
  st.apply(s.test.features);
  return s;
}

inline noisylab::LabeledDataset noisy(const noisylab::LabeledDataset& clean,
                                      const noisylab::NoiseSpec& spec, std::uint64_t seed) {
  return noisylab::corrupt_labels(clean, noisylab::build_transition(spec, clean.k),
                                  noisylab::SeedStreams::from(seed).noise);
}

inline bool same_params(const noisylab::ModelParams& a, const noisylab::ModelParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].weights != b.layers[l].weights || a.layers[l].bias != b.layers[l].bias) return false;
  }
  return true;
}

}  // namespace testing

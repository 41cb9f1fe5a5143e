#include <doctest.h>

#include <numeric>

#include "noisylab/errors.hpp"
#include "noisylab/trainer.hpp"
#include "support/scenario.hpp"

using namespace noisylab;

namespace {

TrainConfig small_config(CriteriaVariant variant) {
  TrainConfig c;
  c.epochs = 6;
  c.warmup_epochs = 2;
  c.batch_size = 32;
  c.select_percent = 60.0;
  c.criteria = {variant, 1.0};
  c.hidden = {16, 16};
  c.schedule = LrSchedule{0.1, {{4, 0.2}}};
  c.seed = 3;
  return c;
}

const testing::Scenario& small_scenario() {
  static const testing::Scenario s = testing::blob_scenario(50, 20, 4, 2, 4.0, 1.0, 7);
  return s;
}

LabeledDataset small_noisy() {
  return testing::noisy(small_scenario().train, NoiseSpec::pair(0.4), 3);
}

using Selections = std::vector<std::vector<std::size_t>>;

Selections record_selections(const TrainConfig& config, const LabeledDataset& train) {
  Selections out;
  RunOptions opts;
  opts.observer = [&](const BatchTrace& t) {
    std::vector<std::size_t> ids;
    for (auto pos : t.selection->selected_indices) ids.push_back((*t.indices)[pos]);
    out.push_back(ids);
  };
  train_run(config, train, small_scenario().test, opts);
  return out;
}

bool same_records(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].test_error != b[i].test_error || a[i].precision != b[i].precision ||
        a[i].train_selected != b[i].train_selected ||
        a[i].selected_per_class != b[i].selected_per_class)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("default variant is plain minibatch SGD") {
  auto config = small_config(CriteriaVariant::None);
  auto train = small_noisy();
  auto result = train_run(config, train, small_scenario().test);

  TrainState state = init_train_state(config, 2, 4);
  auto seeds = SeedStreams::from(config.seed);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& batch : epoch_batches(train.size(), config.batch_size, seeds.shuffle, epoch)) {
      Eigen::MatrixXd x(2, static_cast<Eigen::Index>(batch.size()));
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, static_cast<Eigen::Index>(batch.size()));
      std::vector<std::size_t> all(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        x.col(static_cast<Eigen::Index>(i)) = train.features.row(static_cast<Eigen::Index>(batch[i])).transpose();
        t(train.observed_labels[batch[i]], static_cast<Eigen::Index>(i)) = 1.0;
        all[i] = i;
      }
      auto g = backward(state.params, x, t, all, config.loss);
      sgd_momentum_step(state.params, state.optimizer, g.gradients, epoch);
    }
  }
  CHECK(testing::same_params(state.params, result.final_params));
  for (const auto& r : result.records) CHECK(r.train_selected == train.size());
}

TEST_CASE("zero lambda reduces ALL to OL") {
  auto train = small_noisy();
  auto ol = small_config(CriteriaVariant::OL);
  auto all = small_config(CriteriaVariant::ALL);
  all.criteria.lambda = 0.0;
  ol.criteria.lambda = 0.0;
  auto a = record_selections(all, train);
  auto b = record_selections(ol, train);
  CHECK(a == b);
  CHECK(same_records(train_run(all, train, small_scenario().test).records,
                     train_run(ol, train, small_scenario().test).records));
}

TEST_CASE("warmup covering every epoch matches default") {
  auto train = small_noisy();
  auto base = small_config(CriteriaVariant::None);
  base.warmup_epochs = base.epochs;
  auto reference = train_run(base, train, small_scenario().test);
  for (auto v : {CriteriaVariant::OL, CriteriaVariant::PL, CriteriaVariant::ALL}) {
    for (auto u : {PenaltyUpdate::StackedPerIteration, PenaltyUpdate::RepredictAtEpochEnd}) {
      auto c = base;
      c.criteria.variant = v;
      c.penalty_update = u;
      auto r = train_run(c, train, small_scenario().test);
      CHECK(testing::same_params(r.final_params, reference.final_params));
      CHECK(same_records(r.records, reference.records));
    }
  }
}

TEST_CASE("no noise and full budget selects everything") {
  const auto& s = small_scenario();
  auto ol = small_config(CriteriaVariant::OL);
  ol.select_percent = 100.0;
  auto none = small_config(CriteriaVariant::None);
  auto a = train_run(ol, s.train, s.test);
  auto b = train_run(none, s.train, s.test);
  for (const auto& r : a.records) CHECK(r.train_selected == s.train.size());
  CHECK(a.final_test_error == b.final_test_error);
}

TEST_CASE("selected set size follows the budget per batch") {
  auto train = small_noisy();
  auto c = small_config(CriteriaVariant::ALL);
  RunOptions opts;
  std::size_t active = 0;
  opts.observer = [&](const BatchTrace& t) {
    std::size_t expected = t.selection_active ? selection_count(t.indices->size(), c.select_percent)
                                              : t.indices->size();
    CHECK(t.selection->selected_indices.size() == expected);
    CHECK(t.selection_active == (t.epoch >= c.warmup_epochs));
    active += t.selection_active;
  };
  train_run(c, train, small_scenario().test, opts);
  CHECK(active > 0);
}

TEST_CASE("ideal penalty labels select like OL") {
  auto train = small_noisy();
  auto all = small_config(CriteriaVariant::ALL);
  auto ol = small_config(CriteriaVariant::OL);
  TrainState a = init_train_state(all, 2, 4);
  for (std::size_t e = 0; e < 3; ++e) train_epoch(a, train, all, e);
  TrainState b = a;
  a.penalty = uniform_penalty_labels(4, 2);
  Selections sa, sb;
  train_epoch(a, train, all, 3, [&](const BatchTrace& t) { sa.push_back(t.selection->selected_indices); });
  train_epoch(b, train, ol, 3, [&](const BatchTrace& t) { sb.push_back(t.selection->selected_indices); });
  CHECK(sa == sb);
  CHECK_FALSE(sa.empty());
}

TEST_CASE("penalty labels come from the previous epoch") {
  auto train = small_noisy();
  for (auto u : {PenaltyUpdate::StackedPerIteration, PenaltyUpdate::RepredictAtEpochEnd}) {
    auto c = small_config(CriteriaVariant::ALL);
    c.penalty_update = u;
    RunOptions opts;
    opts.keep_penalty_history = true;
    auto r = train_run(c, train, small_scenario().test, opts);
    REQUIRE(r.penalty_history.size() == c.epochs);
    for (std::size_t e = 0; e < c.epochs; ++e) {
      CHECK(r.penalty_history[e].epoch_of_estimate == static_cast<std::int64_t>(e));
      CHECK(r.penalty_history[e].is_valid(1e-9));
    }
  }
  auto c = small_config(CriteriaVariant::PL);
  TrainState state = init_train_state(c, 2, 4);
  train_epoch(state, train, c, 0);
  CHECK_THROWS_AS(train_epoch(state, train, c, c.warmup_epochs + 1), std::logic_error);
}

TEST_CASE("runs are deterministic") {
  auto train = small_noisy();
  auto c = small_config(CriteriaVariant::ALL);
  auto a = train_run(c, train, small_scenario().test);
  auto b = train_run(c, train, small_scenario().test);
  CHECK(same_records(a.records, b.records));
  CHECK(testing::same_params(a.final_params, b.final_params));
  c.seed = 4;
  auto d = train_run(c, train, small_scenario().test);
  CHECK_FALSE(testing::same_params(a.final_params, d.final_params));
}

TEST_CASE("scores per variant") {
  Eigen::MatrixXd conf(3, 2);
  conf << 0.5, 0.2, 0.3, 0.7, 0.2, 0.1;
  std::vector<int> obs{0, 1};
  auto penalty = uniform_penalty_labels(3, 0);
  auto ol = score_batch(conf, obs, {CriteriaVariant::OL, 1.0}, penalty);
  CHECK(ol == std::vector<double>{0.5, 0.7});
  auto pl = score_batch(conf, obs, {CriteriaVariant::PL, 1.0}, penalty);
  CHECK(pl[0] == doctest::Approx(-0.25));
  auto all = score_batch(conf, obs, {CriteriaVariant::ALL, 1.0}, penalty);
  CHECK(all[0] == doctest::Approx(0.25));
}

TEST_CASE("config validation") {
  auto c = small_config(CriteriaVariant::ALL);
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = small_config(CriteriaVariant::ALL);
  c.select_percent = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = small_config(CriteriaVariant::ALL);
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK(parse_penalty_update("stacked") == PenaltyUpdate::StackedPerIteration);
  CHECK(parse_penalty_update(to_string(PenaltyUpdate::RepredictAtEpochEnd)) ==
        PenaltyUpdate::RepredictAtEpochEnd);
}

TEST_CASE("evaluation helpers") {
  ModelParams p;
  Eigen::MatrixXd w(2, 1);
  w << 1.0, -1.0;
  p.layers.push_back({w, Eigen::VectorXd::Zero(2)});
  FeatureMatrix x(3, 1);
  x << 1.0, -1.0, 0.0;
  CHECK(predict_labels(p, x) == std::vector<int>{0, 1, 0});
  auto test = make_clean_dataset(x, {0, 0, 1}, 2);
  CHECK(evaluate_test_error(p, test) == doctest::Approx(2.0 / 3.0));
}

// Higher-dimensional blobs with nuisance dimensions, where the default run
// memorizes the noisy labels.
TEST_CASE("selection helps under pair noise at desk scale") {
  auto s = testing::blob_scenario(500, 100, 10, 10, 6.0, 1.0, 7);
  auto train = testing::noisy(s.train, NoiseSpec::pair(0.4), 1);
  TrainConfig base;
  base.select_percent = 60.0;
  base.seed = 1;
  auto with = [&](CriteriaVariant v) {
    auto c = base;
    c.criteria.variant = v;
    return train_run(c, train, s.test);
  };
  auto none = with(CriteriaVariant::None);
  auto ol = with(CriteriaVariant::OL);
  auto all = with(CriteriaVariant::ALL);
  MESSAGE("best error default " << none.best_test_error << " OL " << ol.best_test_error
                                << " ALL " << all.best_test_error);
  MESSAGE("final precision OL " << ol.final_precision << " ALL " << all.final_precision);
  CHECK(ol.best_test_error <= none.best_test_error);
  CHECK(all.final_precision > ol.final_precision);
}

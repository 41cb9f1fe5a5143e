#include <doctest.h>

#include <cmath>
#include <sstream>

#include "noisylab/errors.hpp"
#include "noisylab/metrics.hpp"

using namespace noisylab;

TEST_CASE("test error") {
  std::vector<int> truth{0, 1, 2, 0, 1, 2, 0, 1, 2, 0};
  CHECK(test_error(truth, truth) == 0.0);
  std::vector<int> wrong(10, 3);
  CHECK(test_error(wrong, truth) == 1.0);
  auto seven = truth;
  seven[0] = seven[1] = seven[2] = 9;
  CHECK(test_error(seven, truth) == doctest::Approx(0.3));
  CHECK_THROWS_AS(test_error(std::vector<int>{}, std::vector<int>{}), InvalidArgument);
  CHECK_THROWS_AS(test_error(std::vector<int>{1}, truth), InvalidArgument);
}

TEST_CASE("selection precision") {
  std::vector<bool> clean{true, true, true, true, true, true, true, false, false, false};
  std::vector<std::size_t> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(selection_precision(all, clean) == doctest::Approx(0.7));
  std::vector<std::size_t> good{0, 3, 6};
  CHECK(selection_precision(good, clean) == 1.0);
  CHECK_THROWS_AS(selection_precision(std::vector<std::size_t>{}, clean), InvalidArgument);
}

TEST_CASE("mean and standard error") {
  std::vector<double> same{0.2, 0.2, 0.2};
  auto a = mean_and_se(same);
  CHECK(a.mean == doctest::Approx(0.2));
  REQUIRE(a.standard_error);
  CHECK(*a.standard_error == doctest::Approx(0.0));
  std::vector<double> spread{0.10, 0.12, 0.14};
  auto b = mean_and_se(spread);
  CHECK(b.mean == doctest::Approx(0.12));
  CHECK(*b.standard_error == doctest::Approx(0.02 / std::sqrt(3.0)));
  CHECK(*b.standard_error == doctest::Approx(0.011547).epsilon(1e-4));
  std::vector<double> single{0.3};
  auto c = mean_and_se(single);
  CHECK(c.mean == 0.3);
  CHECK_FALSE(c.standard_error.has_value());
}

TEST_CASE("aggregate trials by epoch") {
  auto rec = [](std::size_t e, double err, double prec) {
    RunRecord r;
    r.epoch = e;
    r.test_error = err;
    r.precision = prec;
    return r;
  };
  std::vector<std::vector<RunRecord>> trials = {
      {rec(0, 0.10, 0.5), rec(1, 0.3, 0.6)},
      {rec(0, 0.12, 0.5), rec(1, 0.2, 0.6)},
      {rec(0, 0.14, 0.5), rec(1, 0.1, 0.6)},
  };
  auto agg = aggregate_trials(trials);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].test_error.mean == doctest::Approx(0.12));
  CHECK(*agg[0].test_error.standard_error == doctest::Approx(0.011547).epsilon(1e-4));
  CHECK(*agg[1].precision.standard_error == doctest::Approx(0.0));
  CHECK(best_test_error(trials[0]) == 0.10);
  trials[1].pop_back();
  CHECK_THROWS_AS(aggregate_trials(trials), InvalidArgument);
}

TEST_CASE("metrics csv layout") {
  RunRecord r;
  r.epoch = 3;
  r.test_error = 0.125;
  r.precision = 2.0 / 3.0;
  r.train_selected = 12;
  r.selected_per_class = {5, 7};
  r.lambda = 0.5;
  r.seed = 9;
  r.variant = CriteriaVariant::ALL;
  std::vector<RunRecord> records{r};
  std::ostringstream out;
  write_metrics_csv(out, {{"ALL-stacked-CE-lambda0.5-seed9", &records}}, 2);
  CHECK(out.str() ==
        "run_id,seed,variant,lambda,epoch,train_selected,precision,test_error,selected_class_0,selected_class_1\n"
        "ALL-stacked-CE-lambda0.5-seed9,9,ALL,0.5,3,12,0.666667,0.125000,5,7\n");
}

TEST_CASE("number formatting") {
  CHECK(format_fixed(0.1234567) == "0.123457");
  CHECK(format_fixed(1.0, 2) == "1.00");
  CHECK(format_shortest(1.0) == "1");
  CHECK(format_shortest(0.25) == "0.25");
}

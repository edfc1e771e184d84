#include <cmath>
#include <vector>

#include "doctest.h"
#include "gainprint/analysis.hpp"
#include "gainprint/synth.hpp"
#include "gainprint/telemetry.hpp"
#include "json.hpp"

using namespace gainprint;
using namespace gainprint::analysis;

TEST_CASE("two-class matrix gives accuracy 0.75") {
    const auto cm = ConfusionMatrix::from_rows({{3, 1}, {1, 3}});
    CHECK(accuracy(cm) == doctest::Approx(0.75));
    CHECK(macro_accuracy(cm) == doctest::Approx(0.75));
    const auto p = per_class_precision(cm);
    CHECK(p.precision[0] == doctest::Approx(0.75));
    CHECK_FALSE(p.any_undefined());
    CHECK(weighted_precision(cm) == doctest::Approx(0.75));
}

TEST_CASE("macro accuracy averages recall over classes present in truth") {
    // Class 0: 8/10 correct, class 1: 1/2 correct, class 2 absent.
    const auto cm = ConfusionMatrix::from_rows({{8, 2, 0}, {1, 1, 0}, {0, 0, 0}});
    CHECK(accuracy(cm) == doctest::Approx(9.0 / 12.0));
    CHECK(macro_accuracy(cm) == doctest::Approx((0.8 + 0.5) / 2.0));
    const auto recall = per_class_recall(cm);
    CHECK(recall[0] == doctest::Approx(0.8));
    CHECK(recall[2] == 0.0);
}

TEST_CASE("precision of a never-predicted class is flagged undefined") {
    const auto cm = ConfusionMatrix::from_rows({{5, 0}, {5, 0}});
    const auto p = per_class_precision(cm);
    CHECK(p.precision[0] == doctest::Approx(0.5));
    CHECK(p.undefined[1]);
    CHECK(p.precision[1] == 0.0);
    CHECK(weighted_precision(cm) == doctest::Approx(0.25));
    const std::vector<double> w{1.0, 0.0};
    CHECK(weighted_precision(cm, w) == doctest::Approx(0.5));
}

TEST_CASE("weighted precision uses true-class proportions") {
    // precision: class 0 = 6/8, class 1 = 2/4; truth proportions 7/12 and 5/12.
    const auto cm = ConfusionMatrix::from_rows({{6, 1}, {2, 3}});
    const auto p = per_class_precision(cm);
    CHECK(p.precision[0] == doctest::Approx(6.0 / 8.0));
    CHECK(p.precision[1] == doctest::Approx(3.0 / 4.0));
    CHECK(weighted_precision(cm) == doctest::Approx(7.0 / 12.0 * 0.75 + 5.0 / 12.0 * 0.75));
    CHECK(macro_precision(cm) == doctest::Approx(0.75));
}

TEST_CASE("confusion counts and row normalization") {
    const std::vector<int> truth{0, 0, 1, 2, 2, 2}, pred{0, 1, 1, 2, 2, 0};
    const auto cm = confusion(truth, pred, 3);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(0, 1) == 1);
    CHECK(cm.at(2, 0) == 1);
    CHECK(cm.total() == 6);
    CHECK(cm.row_sum(2) == 3);
    CHECK(cm.col_sum(0) == 2);
    CHECK_FALSE(cm.is_diagonal());
    const auto rn = cm.row_normalized();
    CHECK(rn[2][2] == doctest::Approx(2.0 / 3.0));
    CHECK(ConfusionMatrix::from_rows({{2, 0}, {0, 3}}).is_diagonal());
}

TEST_CASE("confusion CSV header and rows") {
    const std::vector<ActivityLabel> truth{ActivityLabel::ClassicalMusic, ActivityLabel::DogBarking};
    const std::vector<ActivityLabel> pred{ActivityLabel::ClassicalMusic, ActivityLabel::Keyboard};
    const auto csv = confusion_csv(confusion(truth, pred));
    CHECK(csv.rfind("true\\predicted,cm,ck,tk,dg,kb,vc\n", 0) == 0);
    CHECK(csv.find("dg,0,0,0,0,1,0\n") != std::string::npos);
}

TEST_CASE("metrics JSON carries measured values beside the reference block") {
    const std::vector<ActivityLabel> truth{ActivityLabel::ClassicalMusic, ActivityLabel::DogBarking,
                                           ActivityLabel::DogBarking};
    const std::vector<ActivityLabel> pred{ActivityLabel::ClassicalMusic, ActivityLabel::DogBarking,
                                          ActivityLabel::Keyboard};
    const auto rep = evaluate(truth, pred);
    const auto j = nlohmann::json::parse(metrics_json(rep, "eval1", 7));
    CHECK(j.at("measured").at("accuracy").get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(j.at("measured").at("macro_accuracy").get<double>() == doctest::Approx(0.75));
    CHECK(j.at("paper_reference").at("val_precision").at("n7").get<double>() == doctest::Approx(0.9613));
    CHECK(j.at("paper_reference").at("eval1").at("n7").at("macro_accuracy").get<double>() == doctest::Approx(0.7775));
    CHECK(j.at("paper_reference").at("eval2").at("n7").at("macro_accuracy").get<double>() == doctest::Approx(0.8903));
    CHECK(j.contains("divergence"));
    CHECK(j.at("confusion").is_array());
}

TEST_CASE("pearson on known series") {
    const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 6, 8, 10}, z{5, 4, 3, 2, 1};
    CHECK(pearson(x, y) == doctest::Approx(1.0));
    CHECK(pearson(x, z) == doctest::Approx(-1.0));
    const std::vector<double> a{1, 2, 3}, b{1, 3, 2};
    CHECK(pearson(a, b) == doctest::Approx(0.5));
    const std::vector<double> flat{2, 2, 2};
    CHECK_THROWS_AS(pearson(a, flat), UndefinedCorrelationError);
    const std::vector<double> two{1, 2};
    CHECK_THROWS_AS(pearson(two, two), DomainError);
    CHECK_THROWS_AS(pearson(a, x), DomainError);
}

TEST_CASE("amplitude-modulated noise gives a strongly negative level/gain correlation") {
    const auto src = synth::amplitude_modulated_noise(20, 16000, 7);
    telemetry::AgcConfig cfg;
    const auto recs = telemetry::emulate_stream(src, telemetry::MutePolicy::ContinuousSampling, cfg);
    const auto power = audio::power_series(src, 60, cfg.frame_seconds);
    const auto r = gain_power_correlation(power, recs);
    CHECK(r.points == 20);
    CHECK(r.r_mean <= -0.95);
    CHECK(r.r_min <= -0.9);
    REQUIRE(r.r_mean_dba.has_value());
    const auto j = nlohmann::json::parse(correlation_json(power, recs, r));
    CHECK(j.at("minutes").size() == 20);
}

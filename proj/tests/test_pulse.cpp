#include <doctest.h>

#include <stdexcept>

#include "sfq/pulse.hpp"

using namespace sfq;

TEST_CASE("regular_train basic grids") {
    const PulseTrain t = regular_train(50.0, 100.0);
    REQUIRE(t.size() == 5);
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(t[k] == doctest::Approx(20.0 * static_cast<double>(k)));
    }
    CHECK(regular_train(33.3, 1000.0).size() == 34);
    CHECK(regular_train(0.0, 1000.0).empty());
}

TEST_CASE("regular_train wraps phase into one period") {
    const PulseTrain a = regular_train(50.0, 100.0, 5.0);
    const PulseTrain b = regular_train(50.0, 100.0, 25.0);  // 20 ps period
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]));
    CHECK(a.front() == doctest::Approx(5.0));
}

TEST_CASE("regular_train rejects bad arguments") {
    CHECK_THROWS_AS(regular_train(-1.0, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(regular_train(10.0, 0.0), std::invalid_argument);
}

TEST_CASE("poisson_train is seeded, increasing, and near its mean rate") {
    const PulseTrain a = poisson_train(50.0, 100000.0, 7);
    const PulseTrain b = poisson_train(50.0, 100000.0, 7);
    const PulseTrain c = poisson_train(50.0, 100000.0, 8);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(is_strictly_increasing(a));
    // ~5000 expected events, 4 sigma window.
    CHECK(a.size() > 4700);
    CHECK(a.size() < 5300);
}

TEST_CASE("measure_rate counts within the half-open window") {
    const PulseTrain t = regular_train(50.0, 1000.0);
    const RateMeasurement m = measure_rate(t, 0.0, 1000.0);
    CHECK(m.count == 50);
    CHECK(m.rate_ghz == doctest::Approx(50.0));
    // Events at the window end are excluded, at the start included.
    const RateMeasurement w = measure_rate(t, 20.0, 40.0);
    CHECK(w.count == 1);
    CHECK_THROWS_AS(measure_rate(t, 10.0, 10.0), std::invalid_argument);
}

TEST_CASE("train csv round trip") {
    const PulseTrain t = poisson_train(20.0, 5000.0, 3);
    const PulseTrain back = train_from_csv(train_to_csv(t));
    REQUIRE(back.size() == t.size());
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(back[k] == t[k]);
    CHECK(train_from_csv("t_ps\n").empty());
    CHECK_THROWS_AS(train_from_csv("t_ps\n2\n1\n"), std::invalid_argument);
}

TEST_CASE("is_strictly_increasing") {
    CHECK(is_strictly_increasing({}));
    CHECK(is_strictly_increasing({1.0, 2.0, 3.0}));
    CHECK_FALSE(is_strictly_increasing({1.0, 1.0}));
    CHECK_FALSE(is_strictly_increasing({2.0, 1.0}));
}

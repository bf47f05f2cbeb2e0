#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "riemfpp/field_io.hpp"
#include "riemfpp/rng.hpp"
#include "riemfpp/sampler.hpp"
#include "riemfpp/stats.hpp"

using namespace riemfpp;

TEST_CASE("covariance evaluation") {
    CovarianceModel sph = CovarianceModel::spherical(1.0, 1.0);
    CHECK(sph(0.0) == doctest::Approx(1.0));
    CHECK(sph(1.0) == 0.0);
    CHECK(sph(2.5) == 0.0);
    CHECK(sph(0.5) == doctest::Approx(0.3125));  // 1 - 1.5*0.5 + 0.5*0.125

    CovarianceModel sph2 = CovarianceModel::spherical(2.0, 3.0);
    CHECK(sph2(0.0) == doctest::Approx(2.0));
    CHECK(sph2(3.0) == 0.0);
    CHECK(sph2(1.5) == doctest::Approx(2.0 * 0.3125));

    CovarianceModel wen = CovarianceModel::wendland(1.5, 2.0);
    CHECK(wen(0.0) == doctest::Approx(1.5));
    CHECK(wen(2.0) == 0.0);
    double prev = wen(0.0);
    for (int i = 1; i <= 64; ++i) {
        double v = wen(2.0 * i / 64.0 * (1 - 1e-12));
        CHECK(v <= prev + 1e-12);
        prev = v;
    }

    CHECK_THROWS_AS(sph(-0.1), std::domain_error);
}

TEST_CASE("tabulated covariance") {
    auto tab = CovarianceModel::tabulated({0.0, 0.5, 1.0}, {1.0, 0.4, 0.0});
    CHECK(tab(0.0) == doctest::Approx(1.0));
    CHECK(tab(0.25) == doctest::Approx(0.7));
    CHECK(tab(1.0) == 0.0);
    CHECK_THROWS(CovarianceModel::tabulated({0.5, 1.0}, {1.0, 0.0}));
}

namespace {
GridSpec small_grid() { return GridSpec(2, pt(-2, -2), pt(4, 4), 0.5); }
}  // namespace

TEST_CASE("sampling is deterministic in (grid, model, seed)") {
    auto model = CovarianceModel::spherical(1.0, 1.0);
    ScalarField a = sample_field(small_grid(), model, 42);
    ScalarField b = sample_field(small_grid(), model, 42);
    REQUIRE(a.values.size() == b.values.size());
    for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
    ScalarField c = sample_field(small_grid(), model, 43);
    bool any_diff = false;
    for (size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i] != c.values[i]) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("embedding guard: window must exceed twice the range") {
    auto model = CovarianceModel::spherical(1.0, 2.1);
    CHECK_THROWS_AS(sample_field(small_grid(), model, 1), std::invalid_argument);
}

TEST_CASE("Monte Carlo marginals and covariance match the model") {
    auto model = CovarianceModel::spherical(1.0, 1.0);
    CirculantSampler sampler(small_grid(), model);
    const int reps = 10000;
    std::vector<double> sq, lag_half, lag_full, means;
    for (int r = 0; r < reps; ++r) {
        ScalarField f = sampler.sample(derive_seed(7, 1, uint64_t(r)));
        double center = f.node_value({4, 4, 0});
        sq.push_back(center * center);
        lag_half.push_back(center * f.node_value({5, 4, 0}));   // lag 0.5 = range/2
        lag_full.push_back(center * f.node_value({6, 4, 0}));   // lag 1.0 = range
        means.push_back(center);
    }
    auto check_within_3se = [](const std::vector<double>& xs, double target) {
        MeanCI ci = mean_ci(xs);
        double se = ci.sd / std::sqrt(double(ci.n));
        CHECK(std::abs(ci.mean - target) <= 3.0 * se);
    };
    check_within_3se(means, 0.0);
    check_within_3se(sq, 1.0);            // marginal variance = c(0)
    check_within_3se(lag_half, 0.3125);   // c(range/2)
    check_within_3se(lag_full, 0.0);      // compact support: c(r >= range) = 0
}

TEST_CASE("field interpolation") {
    auto model = CovarianceModel::spherical(1.0, 1.0);
    ScalarField f = sample_field(small_grid(), model, 99);

    SUBCASE("exact at nodes") {
        CHECK(f.value(pt(-2, -2)) == doctest::Approx(f.node_value({0, 0, 0})));
        CHECK(f.value(pt(0, 0.5)) == doctest::Approx(f.node_value({4, 5, 0})));
    }
    SUBCASE("edge midpoint is the average of its endpoints") {
        double v0 = f.node_value({4, 4, 0});
        double v1 = f.node_value({5, 4, 0});
        CHECK(f.value(pt(0.25, 0)) == doctest::Approx((v0 + v1) / 2));
    }
    SUBCASE("constant fields reproduce the constant everywhere") {
        std::vector<double> vals(size_t(small_grid().node_count()), 3.25);
        ScalarField c(small_grid(), vals);
        Xoshiro256 rng(5);
        for (int i = 0; i < 50; ++i) {
            Point p = pt(rng.uniform(-2, 2), rng.uniform(-2, 2));
            CHECK(c.value(p) == doctest::Approx(3.25));
        }
    }
    SUBCASE("linear interpolation stays inside the surrounding node range") {
        Xoshiro256 rng(6);
        for (int i = 0; i < 200; ++i) {
            Point p = pt(rng.uniform(-2, 2), rng.uniform(-2, 2));
            double v = f.value(p);
            int64_t i0 = int64_t(std::floor((p[0] + 2) / 0.5));
            int64_t j0 = int64_t(std::floor((p[1] + 2) / 0.5));
            i0 = std::clamp<int64_t>(i0, 0, 7);
            j0 = std::clamp<int64_t>(j0, 0, 7);
            double lo = 1e300, hi = -1e300;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double nv = f.node_value({i0 + a, j0 + b, 0});
                    lo = std::min(lo, nv);
                    hi = std::max(hi, nv);
                }
            CHECK(v >= lo - 1e-12);
            CHECK(v <= hi + 1e-12);
        }
    }
    SUBCASE("cubic spline interpolates the nodes") {
        f.prepare_cubic();
        CHECK(f.value(pt(0, 0), InterpOrder::Cubic) ==
              doctest::Approx(f.node_value({4, 4, 0})).epsilon(1e-9));
        CHECK(f.value(pt(-1.5, 1), InterpOrder::Cubic) ==
              doctest::Approx(f.node_value({1, 6, 0})).epsilon(1e-9));
    }
    SUBCASE("out-of-window points are rejected") {
        CHECK_THROWS_AS(f.value(pt(2.5, 0)), OutOfWindowError);
    }
}

TEST_CASE("3d sampling works and stays deterministic") {
    GridSpec g(3, pt(-1.5, -1.5, -1.5), pt(3, 3, 3), 0.5);
    auto model = CovarianceModel::spherical(1.0, 1.0);
    ScalarField a = sample_field(g, model, 11);
    ScalarField b = sample_field(g, model, 11);
    CHECK(a.values == b.values);
    CHECK(a.value(pt(0.25, 0, 0)) ==
          doctest::Approx((a.node_value({3, 3, 3}) + a.node_value({4, 3, 3})) / 2));
}

TEST_CASE("save/load round trip is bit-identical") {
    auto model = CovarianceModel::wendland(1.0, 1.0);
    ScalarField f = sample_field(small_grid(), model, 123);
    auto dir = std::filesystem::temp_directory_path() / "riemfpp_field_test";
    std::filesystem::create_directories(dir);
    save_field(f, (dir / "field").string());
    ScalarField g = load_field((dir / "field").string());
    CHECK(g.values == f.values);
    CHECK(g.seed == f.seed);
    CHECK(g.covariance.kind_name() == "wendland");
    CHECK(g.grid.node_count() == f.grid.node_count());
    export_field_csv(f, (dir / "field.csv").string());
    CHECK(std::filesystem::exists(dir / "field.csv"));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "repen/errors.hpp"
#include "repen/histmodels.hpp"
#include "repen/rng.hpp"

using namespace repen;

namespace {

Partition parts(std::vector<double> bp, int id = 0) {
    Partition p;
    p.breakpoints = std::move(bp);
    p.model_id = id;
    p.label = "test";
    return p;
}

// Independent quadrature of integral of (shat - s)^2 dP over [0,1], splitting
// at both the partition breakpoints and the regression discontinuities.
double excess_by_quadrature(const FittedHistogram& f, const RegressionSpec& spec) {
    const GaussLegendre rule(64);
    const auto& bp = f.partition->breakpoints;
    const auto cuts = spec.regression.discontinuities();
    double acc = 0.0;
    for (int c = 0; c < f.dimension(); ++c) {
        acc += integrate_split(rule, bp[c], bp[c + 1], cuts, [&](double x) {
            const double d = f.means[c] - eval_regression(spec.regression, x);
            return d * d;
        });
    }
    return acc;
}

}  // namespace

TEST_CASE("cell_index half-open cells, last closed") {
    const Partition p = parts({0.0, 0.25, 0.5, 1.0});
    CHECK(p.cell_index(0.0) == 0);
    CHECK(p.cell_index(0.25) == 1);   // breakpoint belongs to the right cell
    CHECK(p.cell_index(0.4999) == 1);
    CHECK(p.cell_index(0.5) == 2);
    CHECK(p.cell_index(1.0) == 2);    // closed last cell
    CHECK_THROWS_AS(p.cell_index(1.0001), std::domain_error);
}

TEST_CASE("family sizes match the experiment definitions") {
    // floor(200 / ln 200) = 37
    const auto s1 = build_family(ModelFamilySpec::regular_auto(200), 200);
    CHECK(s1.size() == 37);
    CHECK(s1.front().dimension() == 1);
    CHECK(s1.back().dimension() == 37);

    const auto hsd1 = build_family(ModelFamilySpec::dyadic_regular_auto(2048), 2048);
    CHECK(hsd1.size() == 11);  // 2^0 .. 2^10
    CHECK(hsd1.back().dimension() == 1024);

    const auto tiny = build_family(ModelFamilySpec::two_bin_sizes(1, 1, true), 10);
    REQUIRE(tiny.size() == 2);
    CHECK(tiny[0].breakpoints == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(tiny[1].dimension() == 1);

    // floor(200 / (2 ln 200)) = 18 -> 18*18 + constant
    const auto s2 = build_family(ModelFamilySpec::two_bin_auto(200), 200);
    CHECK(s2.size() == 18 * 18 + 1);

    const auto hsd2 = build_family(ModelFamilySpec::dyadic_two_bin_auto(2048), 2048);
    CHECK(hsd2.size() == 11 * 11 + 1);
    // model ids unique
    for (std::size_t i = 0; i < hsd2.size(); ++i) CHECK(hsd2[i].model_id == static_cast<int>(i));
}

TEST_CASE("fit: constant data and the 4-point hand example") {
    const Partition p = parts({0.0, 0.5, 1.0});
    {
        DataSet d;
        d.x = {0.1, 0.3, 0.6, 0.8};
        d.y = {5.0, 5.0, 5.0, 5.0};
        const auto f = fit(p, d);
        CHECK(f.means[0] == doctest::Approx(5.0));
        CHECK(f.means[1] == doctest::Approx(5.0));
        CHECK(f.sumsq[0] == doctest::Approx(0.0));
        CHECK(empirical_risk(f) == doctest::Approx(0.0));
    }
    {
        DataSet d;
        d.x = {0.1, 0.2, 0.6, 0.9};
        d.y = {1.0, 3.0, 2.0, 4.0};
        const auto f = fit(p, d);
        CHECK(f.counts[0] == 2);
        CHECK(f.means[0] == doctest::Approx(2.0));
        CHECK(f.sumsq[0] == doctest::Approx(2.0));
        CHECK(f.counts[1] == 2);
        CHECK(f.means[1] == doctest::Approx(3.0));
        CHECK(f.sumsq[1] == doctest::Approx(2.0));
        CHECK(empirical_risk(f) == doctest::Approx(1.0));
    }
}

TEST_CASE("fit: D=1 gives the sample mean and biased variance") {
    const Partition p = parts({0.0, 1.0});
    DataSet d;
    RngStream rng(3);
    for (int i = 0; i < 100; ++i) {
        d.x.push_back(rng.uniform01());
        d.y.push_back(rng.gaussian());
    }
    const auto f = fit(p, d);
    double mean = 0.0;
    for (double v : d.y) mean += v;
    mean /= d.size();
    double biased_var = 0.0;
    for (double v : d.y) biased_var += (v - mean) * (v - mean);
    biased_var /= d.size();
    CHECK(f.means[0] == doctest::Approx(mean));
    CHECK(empirical_risk(f) == doctest::Approx(biased_var));
}

TEST_CASE("fit: empty cells are data, risk on them is an error") {
    const Partition p = parts({0.0, 0.5, 1.0});
    DataSet d;
    d.x = {0.1, 0.2};
    d.y = {1.0, 2.0};
    const auto f = fit(p, d);
    CHECK(f.has_empty_cell());
    CHECK(std::isnan(f.means[1]));
    CHECK_THROWS_AS(empirical_risk(f), undefined_model_error);
}

TEST_CASE("empirical risk identity and refinement monotonicity") {
    RngStream rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        DataSet d;
        const int n = 60;
        for (int i = 0; i < n; ++i) {
            d.x.push_back(rng.uniform01());
            d.y.push_back(rng.gaussian() * 2.0 + 1.0);
        }
        // Random coarse partition refined by extra random breakpoints.
        std::vector<double> coarse = {0.0, 1.0};
        const int extra = 1 + static_cast<int>(rng.uniform_below(4));
        for (int j = 0; j < extra; ++j) coarse.push_back(0.05 + 0.9 * rng.uniform01());
        std::sort(coarse.begin(), coarse.end());
        std::vector<double> fine = coarse;
        for (int j = 0; j < 3; ++j) fine.push_back(0.05 + 0.9 * rng.uniform01());
        std::sort(fine.begin(), fine.end());
        const auto fc = fit(parts(coarse), d);
        const auto ff = fit(parts(fine), d);
        if (fc.has_empty_cell() || ff.has_empty_cell()) continue;
        // identity: risk = (1/n)(sum y^2 - sum n_l mean_l^2)
        double ysq = 0.0;
        for (double v : d.y) ysq += v * v;
        double mm = 0.0;
        for (int c = 0; c < fc.dimension(); ++c) mm += fc.counts[c] * fc.means[c] * fc.means[c];
        CHECK(empirical_risk(fc) == doctest::Approx((ysq - mm) / n).epsilon(1e-10));
        CHECK(empirical_risk(ff) <= empirical_risk(fc) + 1e-12);
    }
}

TEST_CASE("truth stats: closed-form calculus oracles") {
    RegressionSpec sin_spec{RegressionFunction::sin_pi(), NoiseProfile::constant_sigma(1.0), 100};
    const auto t1 = truth_stats(parts({0.0, 1.0}), sin_spec);
    // beta = integral of sin(pi x) = 2/pi; bias = 1/2 - 4/pi^2
    CHECK(t1.beta[0] == doctest::Approx(0.6366197723675814).epsilon(1e-12));
    CHECK(t1.total_bias() == doctest::Approx(0.094715265430649).epsilon(1e-10));
    CHECK(t1.sigma2[0] == doctest::Approx(1.0));

    RegressionSpec lin_spec{RegressionFunction::constant(2.0), NoiseProfile::linear_sigma(), 100};
    const auto t2 = truth_stats(parts({0.0, 0.5, 1.0}), lin_spec);
    // E[x^2 | x in [0, 1/2)] = 1/12; E[x^2 | x in [1/2, 1]] = 7/12
    CHECK(t2.sigma2[0] == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(t2.sigma2[1] == doctest::Approx(7.0 / 12.0).epsilon(1e-12));
    CHECK(t2.beta[0] == doctest::Approx(2.0));
    CHECK(t2.bias[0] == doctest::Approx(0.0));

    // HeaviSine global mean: integral of 4 sin(4 pi x) is 0; sgn terms give -0.84.
    RegressionSpec hs_spec{RegressionFunction::heavisine(), NoiseProfile::constant_sigma(1.0), 100};
    const auto t3 = truth_stats(parts({0.0, 1.0}), hs_spec);
    CHECK(t3.beta[0] == doctest::Approx(-0.84).epsilon(1e-12));
}

TEST_CASE("truth stats: doubling quadrature nodes is inert") {
    RegressionSpec specs[] = {
        {RegressionFunction::sin_pi(), NoiseProfile::linear_sigma(), 100},
        {RegressionFunction::heavisine(), NoiseProfile::constant_sigma(1.0), 100},
    };
    const Partition p = parts({0.0, 0.2, 0.3, 0.55, 0.72, 0.9, 1.0});
    for (const auto& spec : specs) {
        const auto a = truth_stats(p, spec, 32);
        const auto b = truth_stats(p, spec, 64);
        for (int c = 0; c < p.dimension(); ++c) {
            CHECK(std::abs(a.beta[c] - b.beta[c]) < 1e-9);
            CHECK(std::abs(a.bias[c] - b.bias[c]) < 1e-9);
            CHECK(std::abs(a.sigma2[c] - b.sigma2[c]) < 1e-9);
        }
    }
}

TEST_CASE("excess loss: trivial cases and the D=1 sine oracle") {
    RegressionSpec spec{RegressionFunction::sin_pi(), NoiseProfile::constant_sigma(1.0), 100};
    const Partition p = parts({0.0, 1.0});
    const auto truth = truth_stats(p, spec);
    FittedHistogram f;
    f.partition = &p;
    f.n = 100;
    f.counts = {100};
    f.min_count = 100;
    f.sumsq = {0.0};
    f.means = {truth.beta[0]};
    CHECK(excess_loss(f, truth) == doctest::Approx(truth.total_bias()));
    CHECK(excess_loss(f, truth) == doctest::Approx(0.094715265430649).epsilon(1e-10));
    f.means = {truth.beta[0] + 0.1};
    CHECK(excess_loss(f, truth) == doctest::Approx(truth.total_bias() + 0.01).epsilon(1e-10));
}

TEST_CASE("excess loss: +infinity sentinel on empty cells") {
    RegressionSpec spec{RegressionFunction::sin_pi(), NoiseProfile::constant_sigma(1.0), 4};
    const Partition p = parts({0.0, 0.5, 1.0});
    const auto truth = truth_stats(p, spec);
    DataSet d;
    d.x = {0.1, 0.2};
    d.y = {0.0, 0.0};
    const auto f = fit(p, d);
    CHECK(std::isinf(excess_loss(f, truth)));
}

TEST_CASE("pythagorean identity against direct quadrature") {
    RngStream rng(99);
    const RegressionSpec specs[] = {
        {RegressionFunction::sin_pi(), NoiseProfile::constant_sigma(1.0), 120},
        {RegressionFunction::heavisine(), NoiseProfile::linear_sigma(), 120},
    };
    for (int rep = 0; rep < 30; ++rep) {
        const auto& spec = specs[rep % 2];
        const int d_cells = 1 + static_cast<int>(rng.uniform_below(12));
        Partition p = parts({});
        p.breakpoints.push_back(0.0);
        for (int j = 1; j < d_cells; ++j) p.breakpoints.push_back(static_cast<double>(j) / d_cells);
        p.breakpoints.push_back(1.0);
        const DataSet data = generate(spec, 1000 + rep);
        const auto f = fit(p, data);
        if (f.has_empty_cell()) continue;
        const auto truth = truth_stats(p, spec);
        const double lhs = excess_loss(f, truth);
        const double rhs = excess_by_quadrature(f, spec);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
}

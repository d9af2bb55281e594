#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topogcn/stats.hpp"

using namespace topogcn;

namespace {

/// Average rank of each value by direct counting.
std::vector<double> brute_ranks(std::span<const double> v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double below = 0.0;
        double equal = 0.0;
        for (double w : v) {
            below += w < v[i] ? 1.0 : 0.0;
            equal += w == v[i] ? 1.0 : 0.0;
        }
        r[i] = below + (equal + 1.0) / 2.0;
    }
    return r;
}

/// H straight from the definition, tie corrected; p in closed form for 1 or 2 df.
TestResult brute_kw(std::span<const double> v, std::span<const ClassId> labels) {
    const auto r = brute_ranks(v);
    const double n = static_cast<double>(v.size());
    std::map<ClassId, std::pair<double, double>> groups;
    for (std::size_t i = 0; i < v.size(); ++i) {
        groups[labels[i]].first += r[i];
        groups[labels[i]].second += 1.0;
    }
    double h = 0.0;
    for (const auto &[c, g] : groups) {
        const double mean = g.first / g.second;
        h += g.second * (mean - (n + 1.0) / 2.0) * (mean - (n + 1.0) / 2.0);
    }
    h *= 12.0 / (n * (n + 1.0));
    std::map<double, double> ties;
    for (double x : v) {
        ties[x] += 1.0;
    }
    double t = 0.0;
    for (const auto &[x, k] : ties) {
        t += k * k * k - k;
    }
    h /= 1.0 - t / (n * n * n - n);
    const auto df = groups.size() - 1;
    const double p = df == 1 ? std::erfc(std::sqrt(h / 2.0)) : std::exp(-h / 2.0);
    return {h, p};
}

/// U counted over all pairs; p from the exact null mean and variance of U
/// obtained by enumerating every assignment of the pooled values.
TestResult brute_mw(const std::vector<double> &a, const std::vector<double> &b) {
    auto u_of = [](const std::vector<double> &x, const std::vector<double> &y) {
        double u = 0.0;
        for (double p : x) {
            for (double q : y) {
                u += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
            }
        }
        return u;
    };
    const double u = u_of(a, b);
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size();
    double sum = 0.0;
    double sq = 0.0;
    double count = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != a.size()) {
            continue;
        }
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < n; ++i) {
            ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
        }
        const double s = u_of(x, y);
        sum += s;
        sq += s * s;
        count += 1.0;
    }
    const double mean = sum / count;
    const double var = sq / count - mean * mean;
    if (var <= 1e-12) {
        return {u, 1.0};
    }
    const double z = std::max(std::abs(u - mean) - 0.5, 0.0) / std::sqrt(var);
    return {u, std::erfc(z / std::sqrt(2.0))};
}

} // namespace

TEST_CASE("Kruskal-Wallis on two separated groups") {
    std::vector<double> v{1, 2, 3, 10, 11, 12};
    std::vector<ClassId> l{0, 0, 0, 1, 1, 1};
    auto r = kruskal_wallis(v, l);
    CHECK(r.statistic == doctest::Approx(27.0 / 7.0).epsilon(1e-12));
    CHECK(r.p_value < 0.05);
    CHECK(r.p_value == doctest::Approx(std::erfc(std::sqrt(27.0 / 14.0))).epsilon(1e-10));
}

TEST_CASE("Kruskal-Wallis of a constant feature has p = 1") {
    std::vector<double> v(9, 4.0);
    std::vector<ClassId> l{0, 1, 2, 0, 1, 2, 0, 1, 2};
    auto r = kruskal_wallis(v, l);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("Kruskal-Wallis matches the definition on random tied data") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        CAPTURE(trial);
        const std::size_t groups = 2 + static_cast<std::size_t>(trial % 2);
        std::vector<double> v;
        std::vector<ClassId> l;
        for (std::size_t i = 0; i < 15; ++i) {
            v.push_back(static_cast<double>(uniform_below(rng, 6)));
            l.push_back(static_cast<ClassId>(i % groups));
        }
        if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) {
            continue;
        }
        auto want = brute_kw(v, l);
        auto got = kruskal_wallis(v, l);
        CHECK(got.statistic == doctest::Approx(want.statistic).epsilon(1e-10));
        CHECK(got.p_value == doctest::Approx(want.p_value).epsilon(1e-9));
    }
}

TEST_CASE("Kruskal-Wallis is invariant under monotone transforms and label renaming") {
    Rng rng(5);
    std::vector<double> v;
    std::vector<ClassId> l;
    for (std::size_t i = 0; i < 40; ++i) {
        v.push_back(uniform01(rng) + 0.1 * static_cast<double>(i % 4));
        l.push_back(static_cast<ClassId>(i % 4));
    }
    auto base = kruskal_wallis(v, l);
    std::vector<double> w;
    for (double x : v) {
        w.push_back(std::exp(3.0 * x) - 7.0);
    }
    std::vector<ClassId> renamed;
    for (auto c : l) {
        renamed.push_back(static_cast<ClassId>(3 - c));
    }
    CHECK(kruskal_wallis(w, l).statistic == doctest::Approx(base.statistic).epsilon(1e-12));
    CHECK(kruskal_wallis(v, renamed).p_value == doctest::Approx(base.p_value).epsilon(1e-12));
}

TEST_CASE("Kruskal-Wallis needs two populated classes") {
    std::vector<double> v{1, 2, 3};
    std::vector<ClassId> l{2, 2, 2};
    CHECK_THROWS_AS(kruskal_wallis(v, l), std::invalid_argument);
    std::vector<ClassId> short_labels{0, 1};
    CHECK_THROWS_AS(kruskal_wallis(v, short_labels), std::invalid_argument);
    // an unused class id between populated ones does not add a degree of freedom
    std::vector<ClassId> gap{0, 0, 2};
    std::vector<double> u{1, 2, 3};
    CHECK(kruskal_wallis(u, gap).p_value == doctest::Approx(brute_kw(u, gap).p_value).epsilon(1e-10));
}

TEST_CASE("Mann-Whitney on disjoint ranges") {
    std::vector<double> a(10);
    std::vector<double> b(10);
    std::iota(a.begin(), a.end(), 1.0);
    std::iota(b.begin(), b.end(), 11.0);
    auto r = mann_whitney(a, b);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value < 0.01);
    CHECK(mann_whitney(b, a).statistic == 100.0);
}

TEST_CASE("Mann-Whitney of identical samples is not significant") {
    std::vector<double> a{0.8, 0.81, 0.79, 0.8, 0.82};
    auto r = mann_whitney(a, a);
    CHECK(r.statistic == doctest::Approx(12.5));
    CHECK(r.p_value == doctest::Approx(1.0));
    std::vector<double> c(6, 0.5);
    CHECK(mann_whitney(c, c).p_value == 1.0);
}

TEST_CASE("Mann-Whitney matches exhaustive enumeration of the null") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        CAPTURE(trial);
        const std::size_t na = 2 + uniform_below(rng, 5);
        const std::size_t nb = 2 + uniform_below(rng, 5);
        std::vector<double> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < na; ++i) {
            a.push_back(static_cast<double>(uniform_below(rng, 5)));
        }
        for (std::size_t i = 0; i < nb; ++i) {
            b.push_back(static_cast<double>(uniform_below(rng, 5)));
        }
        auto want = brute_mw(a, b);
        auto got = mann_whitney(a, b);
        CHECK(got.statistic == doctest::Approx(want.statistic).epsilon(1e-12));
        CHECK(got.p_value == doctest::Approx(want.p_value).epsilon(1e-9));
        auto swapped = mann_whitney(b, a);
        CHECK(swapped.statistic == doctest::Approx(static_cast<double>(na * nb) - got.statistic));
        CHECK(swapped.p_value == doctest::Approx(got.p_value).epsilon(1e-12));
    }
    CHECK_THROWS_AS(mann_whitney(std::vector<double>{}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("class correlation of the colored example") {
    auto ds = fixture::colored_example();
    auto und = class_correlation(ds);
    CHECK(und.counts(0, 0) == 2.0);
    CHECK(und.counts(0, 1) == 2.0);
    CHECK(und.counts(1, 0) == 2.0);
    CHECK(und.counts(1, 1) == 6.0);
    CHECK(und.fraction(1, 1) == doctest::Approx(0.75));
    CHECK(und.diagonal_mass == doctest::Approx(0.625));
    CHECK(und.baseline_squared == doctest::Approx(0.52));
    CHECK(und.baseline_uniform == 0.5);
    auto dir = class_correlation(ds, true);
    CHECK(dir.counts(0, 0) == 1.0);
    CHECK(dir.counts(0, 1) == 2.0);
    CHECK(dir.counts(1, 0) == 0.0);
    CHECK(dir.counts(1, 1) == 3.0);
    CHECK(dir.fraction(0, 1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("class correlation rows are distributions") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto ds = fixture::labeled(oracle::random_digraph(30, 0.1, seed), 4, seed);
        for (bool directed : {false, true}) {
            auto cc = class_correlation(ds, directed);
            double total = 0.0;
            for (std::size_t j = 0; j < 4; ++j) {
                auto row = cc.fraction.row(j);
                const double s = std::accumulate(row.begin(), row.end(), 0.0);
                CHECK((s == 0.0 || std::abs(s - 1.0) < 1e-12));
                auto crow = cc.counts.row(j);
                total += std::accumulate(crow.begin(), crow.end(), 0.0);
            }
            CHECK(total == static_cast<double>(directed ? ds.graph.n_edges() : ds.graph.symmetrized().n_edges()));
        }
    }
}

TEST_CASE("class correlation of a label-aligned graph is the identity") {
    std::vector<Edge> edges;
    for (NodeId u = 0; u < 12; ++u) {
        edges.push_back({u, static_cast<NodeId>((u + 3) % 12)});
    }
    auto ds = fixture::labeled(DirectedGraph(12, edges), 3, 0);
    for (NodeId u = 0; u < 12; ++u) {
        ds.labels[u] = static_cast<ClassId>(u % 3);
    }
    auto cc = class_correlation(ds);
    CHECK(cc.fraction == DenseMatrix::identity(3));
    CHECK(cc.diagonal_mass == 1.0);
}

TEST_CASE("random labels sit near the uniform baseline") {
    auto ds = fixture::labeled(oracle::random_digraph(400, 0.02, 8), 4, 21);
    auto cc = class_correlation(ds);
    CHECK(std::abs(cc.diagonal_mass - cc.baseline_uniform) < 0.03);
    CHECK(std::abs(cc.baseline_squared - 0.25) < 0.01);
}

TEST_CASE("accuracy counts argmax hits on the test nodes") {
    DenseMatrix p(4, 2, std::vector<double>{0.9, 0.1, 0.2, 0.8, 0.6, 0.4, 0.3, 0.7});
    std::vector<ClassId> labels{0, 1, 1, 1};
    std::vector<NodeId> test{1, 2, 3};
    CHECK(accuracy(p, labels, test) == doctest::Approx(2.0 / 3.0));
    std::vector<NodeId> none;
    CHECK_THROWS_AS(accuracy(p, labels, none), std::invalid_argument);
}

TEST_CASE("summaries skip diverged splits") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto r = summarize("m", {0.7, 0.8, nan, 0.9}, {1, 2, 3, 4});
    CHECK(r.model == "m");
    CHECK(r.diverged == 1);
    CHECK(r.mean == doctest::Approx(0.8));
    CHECK(r.std_dev == doctest::Approx(0.1));
    CHECK(r.seeds.size() == 4);
    CHECK(summarize("s", {0.5}, {0}).std_dev == 0.0);
}

#include "topogcn/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace topogcn {

namespace {

/// Average ranks (1-based) of `values`; `tie_term` receives sum(t^3 - t) over tie groups.
std::vector<double> average_ranks(std::span<const double> values, double &tie_term) {
    const auto n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    return ranks;
}

} // namespace

TestResult kruskal_wallis(std::span<const double> values, std::span<const ClassId> labels) {
    if (values.size() != labels.size()) {
        throw std::invalid_argument("kruskal_wallis: values and labels differ in length");
    }
    const ClassId n_groups = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<double> rank_sum(n_groups, 0.0);
    std::vector<double> count(n_groups, 0.0);
    double tie_term = 0.0;
    const auto ranks = average_ranks(values, tie_term);
    for (std::size_t i = 0; i < values.size(); ++i) {
        rank_sum[labels[i]] += ranks[i];
        count[labels[i]] += 1.0;
    }
    const auto nonempty = std::count_if(count.begin(), count.end(), [](double c) { return c > 0.0; });
    if (nonempty < 2) {
        throw std::invalid_argument("kruskal_wallis: need >= 2 classes with samples");
    }
    const double n = static_cast<double>(values.size());
    const double correction = 1.0 - tie_term / (n * n * n - n);
    if (correction <= 0.0) {
        return {0.0, 1.0};
    }
    double h = 0.0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        if (count[g] > 0.0) {
            h += rank_sum[g] * rank_sum[g] / count[g];
        }
    }
    h = (12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0)) / correction;
    h = std::max(h, 0.0);
    const double df = static_cast<double>(nonempty - 1);
    return {h, boost::math::gamma_q(df / 2.0, h / 2.0)};
}

TestResult mann_whitney(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("mann_whitney: both samples must be nonempty");
    }
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    double tie_term = 0.0;
    const auto ranks = average_ranks(pooled, tie_term);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;
    double rank_a = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        rank_a += ranks[i];
    }
    const double u = rank_a - na * (na + 1.0) / 2.0;
    const double mu = na * nb / 2.0;
    const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) {
        return {u, 1.0};
    }
    const double z = std::max(std::abs(u - mu) - 0.5, 0.0) / std::sqrt(var);
    return {u, std::min(1.0, std::erfc(z / std::sqrt(2.0)))};
}

ClassCorrelation class_correlation(const LabeledDataset &ds, bool directed) {
    const auto c = ds.n_classes;
    ClassCorrelation out;
    out.counts = DenseMatrix(c, c);
    const auto &g = ds.graph;
    for (NodeId u = 0; u < g.n_nodes(); ++u) {
        for (NodeId v : directed ? g.out(u) : g.undirected(u)) {
            out.counts(ds.labels[u], ds.labels[v]) += 1.0;
        }
    }
    out.fraction = DenseMatrix(c, c);
    double diag = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            total += out.counts(j, i);
        }
        if (total == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < c; ++i) {
            out.fraction(j, i) = out.counts(j, i) / total;
        }
        diag += out.fraction(j, j);
    }
    out.diagonal_mass = c == 0 ? 0.0 : diag / static_cast<double>(c);

    std::vector<double> share(c, 0.0);
    for (auto label : ds.labels) {
        share[label] += 1.0;
    }
    for (double s : share) {
        const double p = s / static_cast<double>(ds.n_nodes());
        out.baseline_squared += p * p;
    }
    out.baseline_uniform = c == 0 ? 0.0 : 1.0 / static_cast<double>(c);
    return out;
}

double accuracy(const DenseMatrix &posteriors, std::span<const ClassId> labels, std::span<const NodeId> test) {
    if (test.empty()) {
        throw std::invalid_argument("accuracy: empty test set");
    }
    std::size_t hits = 0;
    for (NodeId i : test) {
        auto row = posteriors.row(i);
        const auto best = static_cast<ClassId>(std::max_element(row.begin(), row.end()) - row.begin());
        hits += best == labels[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

EvalReport summarize(std::string model, std::vector<double> accuracies, std::vector<std::uint64_t> seeds) {
    EvalReport r;
    r.model = std::move(model);
    r.seeds = std::move(seeds);
    r.accuracies = std::move(accuracies);
    double sum = 0.0;
    std::size_t k = 0;
    for (double a : r.accuracies) {
        if (std::isfinite(a)) {
            sum += a;
            ++k;
        } else {
            ++r.diverged;
        }
    }
    if (k == 0) {
        r.mean = std::nan("");
        r.std_dev = std::nan("");
        return r;
    }
    r.mean = sum / static_cast<double>(k);
    if (k > 1) {
        double ss = 0.0;
        for (double a : r.accuracies) {
            if (std::isfinite(a)) {
                ss += (a - r.mean) * (a - r.mean);
            }
        }
        r.std_dev = std::sqrt(ss / static_cast<double>(k - 1));
    }
    return r;
}

} // namespace topogcn

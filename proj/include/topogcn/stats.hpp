#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topogcn/dataset.hpp"
#include "topogcn/matrix.hpp"

namespace topogcn {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Kruskal-Wallis H with average ranks for ties and the tie correction; p from
/// the chi-squared distribution with (groups - 1) degrees of freedom. Throws
/// std::invalid_argument unless at least two classes have samples.
TestResult kruskal_wallis(std::span<const double> values, std::span<const ClassId> labels);

/// Mann-Whitney U of sample a (pairs a > b, ties counting one half), with a
/// two-sided normal-approximation p using tie and continuity corrections.
TestResult mann_whitney(std::span<const double> a, std::span<const double> b);

/// Row j, column i: fraction of class-j nodes' neighbor incidences that land on class i.
struct ClassCorrelation {
    DenseMatrix counts;
    DenseMatrix fraction;
    /// Trace of `fraction` divided by C.
    double diagonal_mass = 0.0;
    /// sum_j p(class j)^2: the diagonal mass expected under random labels.
    double baseline_squared = 0.0;
    /// 1 / C.
    double baseline_uniform = 0.0;
};

/// Undirected mode counts every adjacent pair once in each direction;
/// directed mode counts edge u -> v only as (class u, class v).
ClassCorrelation class_correlation(const LabeledDataset &ds, bool directed = false);

/// Fraction of `test` nodes whose argmax posterior matches the label.
/// Throws std::invalid_argument on an empty test set.
double accuracy(const DenseMatrix &posteriors, std::span<const ClassId> labels, std::span<const NodeId> test);

struct EvalReport {
    std::string model;
    std::vector<std::uint64_t> seeds;
    /// Per split; NaN marks a split whose training diverged.
    std::vector<double> accuracies;
    double mean = 0.0;
    /// Sample standard deviation (n - 1); 0 for a single split.
    double std_dev = 0.0;
    std::size_t diverged = 0;
};

/// Mean and std over the finite entries of `accuracies`.
EvalReport summarize(std::string model, std::vector<double> accuracies, std::vector<std::uint64_t> seeds);

} // namespace topogcn

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tdm/rng.hpp"

namespace tdm {

struct ForestParams {
    int n_trees = 100;
    int max_depth = 8;
    int min_leaf = 2;
    int n_candidate_features = 11; // ceil(sqrt(117))
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const ForestParams&) const = default;
};

/// Flat binary tree. Internal nodes route "value <= threshold" to the left;
/// leaves store the positive fraction of their training rows.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double fraction = 0.0;

    bool is_leaf() const { return left < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> row) const;
    int depth() const;
};

using Forest = std::vector<Tree>;

/// Gini impurity of a binary label multiset: 1 - p^2 - (1-p)^2.
double gini(const std::vector<int>& labels);
double gini_counts(std::int64_t positives, std::int64_t total);

/// Grows one tree. At each node, n_candidate_features distinct features are
/// drawn from rng; thresholds are midpoints between consecutive distinct
/// sorted values; best split by weighted child Gini, ties to the lowest
/// feature index then lowest threshold.
Tree train_tree(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                Rng& rng, const ForestParams& params);

/// n_trees trees, each on a bootstrap resample. Tree t derives its bootstrap
/// and feature-sampling generators from (params.seed, t); output is
/// bit-reproducible for fixed inputs.
Forest train_forest(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                    const ForestParams& params);

/// Mean over trees of the leaf fraction reached by x.
double predict_proba(const Forest& forest, std::span<const double> x);

} // namespace tdm

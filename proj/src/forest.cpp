#include "tdm/forest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tdm {

void ForestParams::validate() const {
    if (n_trees < 1 || max_depth < 1 || min_leaf < 1 || n_candidate_features < 1)
        throw std::invalid_argument("forest parameters must all be >= 1");
}

double Tree::predict(std::span<const double> row) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
        const TreeNode& node = nodes[static_cast<std::size_t>(i)];
        i = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(i)].fraction;
}

int Tree::depth() const {
    // depth of the root is 0
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int deepest = 0;
    while (!stack.empty()) {
        const auto [i, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        const TreeNode& node = nodes[static_cast<std::size_t>(i)];
        if (!node.is_leaf()) {
            stack.emplace_back(node.left, d + 1);
            stack.emplace_back(node.right, d + 1);
        }
    }
    return deepest;
}

double gini_counts(std::int64_t positives, std::int64_t total) {
    if (total <= 0) throw std::invalid_argument("gini of an empty label multiset");
    const double p = static_cast<double>(positives) / static_cast<double>(total);
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

double gini(const std::vector<int>& labels) {
    std::int64_t positives = 0;
    for (int label : labels) positives += label != 0 ? 1 : 0;
    return gini_counts(positives, static_cast<std::int64_t>(labels.size()));
}

namespace {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double weighted_gini = 0.0;
};

struct TreeBuilder {
    const std::vector<std::vector<double>>& rows;
    const std::vector<int>& labels;
    Rng& rng;
    const ForestParams& params;
    int dim;
    Tree tree;

    int build(std::vector<int>& node_rows, int depth) {
        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        std::int64_t positives = 0;
        for (int r : node_rows) positives += labels[static_cast<std::size_t>(r)] != 0 ? 1 : 0;
        const std::int64_t total = static_cast<std::int64_t>(node_rows.size());
        const double node_gini = gini_counts(positives, total);
        const double fraction = static_cast<double>(positives) / static_cast<double>(total);

        const bool stop = depth >= params.max_depth || positives == 0 || positives == total ||
                          total < 2 * static_cast<std::int64_t>(params.min_leaf);
        SplitChoice split;
        if (!stop) split = best_split(node_rows, node_gini);

        if (!split.found) {
            tree.nodes[static_cast<std::size_t>(node_index)].fraction = fraction;
            return node_index;
        }

        std::vector<int> left_rows, right_rows;
        for (int r : node_rows) {
            if (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(split.feature)] <=
                split.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        node_rows.clear();
        node_rows.shrink_to_fit();

        const int left = build(left_rows, depth + 1);
        const int right = build(right_rows, depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }

    SplitChoice best_split(const std::vector<int>& node_rows, double node_gini) {
        const std::vector<int> candidates =
            rng.sample_distinct(std::min(params.n_candidate_features, dim), dim);
        const std::int64_t total = static_cast<std::int64_t>(node_rows.size());

        SplitChoice best;
        std::vector<std::pair<double, int>> ordered(node_rows.size());
        for (int feature : candidates) {
            for (std::size_t i = 0; i < node_rows.size(); ++i) {
                const int r = node_rows[i];
                ordered[i] = {rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(feature)],
                              labels[static_cast<std::size_t>(r)] != 0 ? 1 : 0};
            }
            std::sort(ordered.begin(), ordered.end());

            std::int64_t left_n = 0, left_pos = 0, all_pos = 0;
            for (const auto& [value, label] : ordered) all_pos += label;

            for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
                left_n += 1;
                left_pos += ordered[i].second;
                if (ordered[i].first == ordered[i + 1].first) continue;
                const double threshold = ordered[i].first +
                                         (ordered[i + 1].first - ordered[i].first) / 2.0;
                const std::int64_t right_n = total - left_n;
                const double weighted =
                    (static_cast<double>(left_n) * gini_counts(left_pos, left_n) +
                     static_cast<double>(right_n) * gini_counts(all_pos - left_pos, right_n)) /
                    static_cast<double>(total);
                // strict improvements only; scan order makes ties resolve to
                // the lowest feature index, then the lowest threshold
                if (weighted < node_gini && (!best.found || weighted < best.weighted_gini)) {
                    best.found = true;
                    best.feature = feature;
                    best.threshold = threshold;
                    best.weighted_gini = weighted;
                }
            }
        }
        return best;
    }
};

int check_rows(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
    if (rows.empty()) throw std::invalid_argument("training rows must be non-empty");
    if (rows.size() != labels.size())
        throw std::invalid_argument("rows and labels must have the same length");
    const std::size_t dim = rows.front().size();
    if (dim == 0) throw std::invalid_argument("training rows must have at least one feature");
    for (const auto& row : rows)
        if (row.size() != dim)
            throw std::invalid_argument("row dimension mismatch: expected " + std::to_string(dim) +
                                        ", got " + std::to_string(row.size()));
    return static_cast<int>(dim);
}

} // namespace

Tree train_tree(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                Rng& rng, const ForestParams& params) {
    params.validate();
    const int dim = check_rows(rows, labels);
    TreeBuilder builder{rows, labels, rng, params, dim, {}};
    std::vector<int> all(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) all[i] = static_cast<int>(i);
    builder.build(all, 0);
    return std::move(builder.tree);
}

Forest train_forest(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                    const ForestParams& params) {
    params.validate();
    check_rows(rows, labels);
    const int n = static_cast<int>(rows.size());

    Forest forest;
    forest.reserve(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        Rng bootstrap_rng(derive_seed(params.seed, static_cast<std::uint64_t>(t), 0));
        Rng feature_rng(derive_seed(params.seed, static_cast<std::uint64_t>(t), 1));

        std::vector<std::vector<double>> sample_rows;
        std::vector<int> sample_labels;
        sample_rows.reserve(static_cast<std::size_t>(n));
        sample_labels.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int r = bootstrap_rng.next_int(n);
            sample_rows.push_back(rows[static_cast<std::size_t>(r)]);
            sample_labels.push_back(labels[static_cast<std::size_t>(r)]);
        }
        forest.push_back(train_tree(sample_rows, sample_labels, feature_rng, params));
    }
    return forest;
}

double predict_proba(const Forest& forest, std::span<const double> x) {
    if (forest.empty()) throw std::invalid_argument("empty forest");
    double sum = 0.0;
    for (const Tree& tree : forest) sum += tree.predict(x);
    return sum / static_cast<double>(forest.size());
}

} // namespace tdm

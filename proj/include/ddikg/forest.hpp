#pragma once

// Random forest over integer count features, ROC-AUC and stratified cross-validation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace ddikg::predict {

using Sample = std::vector<std::uint32_t>;

struct ForestParams {
    std::size_t trees = 100;
    std::optional<std::size_t> max_depth;     // unbounded when empty
    std::optional<std::size_t> max_features;  // floor(sqrt(d)) when empty
    std::uint64_t seed = 0;
    bool bootstrap = true;
};

struct TreeNode {
    int feature = -1;  // -1 for leaves
    std::uint32_t threshold = 0;  // x[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    double negatives = 0;  // training samples reaching the node (bootstrap multiplicity included)
    double positives = 0;
};

class Tree {
public:
    explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    const TreeNode& leaf(const Sample& x) const;
    // Positive iff the leaf holds strictly more positives than negatives.
    bool vote(const Sample& x) const;
    double leaf_probability(const Sample& x) const;
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::size_t depth() const;

private:
    std::vector<TreeNode> nodes_;
};

class Forest {
public:
    Forest(std::vector<Tree> trees, std::size_t dimensions, ForestParams params)
        : trees_(std::move(trees)), dimensions_(dimensions), params_(params) {}

    // Fraction of trees voting positive. Throws InvalidInput on a dimension mismatch.
    double predict(const Sample& x) const;
    bool classify(const Sample& x) const { return predict(x) > 0.5; }

    const std::vector<Tree>& trees() const noexcept { return trees_; }
    std::size_t dimensions() const noexcept { return dimensions_; }
    const ForestParams& params() const noexcept { return params_; }

private:
    std::vector<Tree> trees_;
    std::size_t dimensions_;
    ForestParams params_;
};

// Rows are put in a canonical order before sampling, so the result does not depend on the
// order they are given in. Throws InvalidInput unless both classes are present.
Forest train_random_forest(const std::vector<Sample>& x, const std::vector<int>& y, const ForestParams& params);

// Mann-Whitney rank statistic with average ranks for ties. Throws InvalidInput when a class is absent.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct Metrics {
    double roc_auc = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t rows = 0;
};

struct CvMetrics {
    std::vector<Metrics> folds;
    Metrics mean;  // unweighted mean over folds
};

// Fold index per row; each class is shuffled with `seed` and dealt round-robin.
std::vector<std::size_t> stratified_folds(const std::vector<int>& y, std::size_t k, std::uint64_t seed);

Metrics classification_metrics(const std::vector<double>& scores, const std::vector<int>& labels);

// Throws InvalidInput when k < 2 or a class has fewer than k rows.
CvMetrics evaluate_cv(const std::vector<Sample>& x, const std::vector<int>& y, std::size_t k, const ForestParams& params);

} // namespace ddikg::predict

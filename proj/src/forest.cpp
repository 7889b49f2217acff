#include "ddikg/forest.hpp"

#include "ddikg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ddikg::predict {

const TreeNode& Tree::leaf(const Sample& x) const {
    const TreeNode* n = &nodes_.at(0);
    while (n->feature >= 0) n = &nodes_[x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right];
    return *n;
}

bool Tree::vote(const Sample& x) const {
    const auto& n = leaf(x);
    return n.positives > n.negatives;
}

double Tree::leaf_probability(const Sample& x) const {
    const auto& n = leaf(x);
    return n.positives / (n.positives + n.negatives);
}

std::size_t Tree::depth() const {
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        best = std::max(best, d[i]);
        if (nodes_[i].feature >= 0) {
            d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
        }
    }
    return best;
}

double Forest::predict(const Sample& x) const {
    if (x.size() != dimensions_)
        throw InvalidInput("feature vector has " + std::to_string(x.size()) + " entries, forest expects " +
                           std::to_string(dimensions_));
    std::size_t yes = 0;
    for (const auto& t : trees_) yes += t.vote(x);
    return static_cast<double>(yes) / static_cast<double>(trees_.size());
}

namespace {

struct Weighted {
    std::size_t row;
    double weight;
};

double gini(double neg, double pos) {
    double total = neg + pos;
    if (total <= 0) return 0;
    double p = pos / total, q = neg / total;
    return 1.0 - p * p - q * q;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<Sample>& x, const std::vector<int>& y, const ForestParams& params, std::size_t mtry,
                std::mt19937_64& rng)
        : x_(x), y_(y), params_(params), mtry_(mtry), rng_(rng) {}

    Tree build(std::vector<Weighted> samples) {
        grow(std::move(samples), 0);
        return Tree(std::move(nodes_));
    }

private:
    int grow(std::vector<Weighted> samples, std::size_t depth) {
        TreeNode node;
        for (const auto& s : samples) (y_[s.row] ? node.positives : node.negatives) += s.weight;
        int index = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        bool pure = node.positives == 0 || node.negatives == 0;
        if (pure || (params_.max_depth && depth >= *params_.max_depth) || samples.size() < 2) return index;

        auto split = best_split(samples, node);
        if (!split) return index;
        std::vector<Weighted> left, right;
        for (const auto& s : samples) (x_[s.row][split->feature] <= split->threshold ? left : right).push_back(s);
        samples.clear();
        samples.shrink_to_fit();
        int l = grow(std::move(left), depth + 1);
        int r = grow(std::move(right), depth + 1);
        nodes_[static_cast<std::size_t>(index)].feature = static_cast<int>(split->feature);
        nodes_[static_cast<std::size_t>(index)].threshold = split->threshold;
        nodes_[static_cast<std::size_t>(index)].left = l;
        nodes_[static_cast<std::size_t>(index)].right = r;
        return index;
    }

    struct Split {
        std::size_t feature;
        std::uint32_t threshold;
        double impurity;
    };

    std::optional<Split> best_split(std::vector<Weighted>& samples, const TreeNode& node) {
        const std::size_t d = x_[0].size();
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), 0);
        std::shuffle(features.begin(), features.end(), rng_);
        const double total = node.negatives + node.positives;
        const double parent = total * gini(node.negatives, node.positives);
        std::optional<Split> best;
        std::size_t considered = 0;
        for (std::size_t f : features) {
            if (considered == mtry_) break;
            std::stable_sort(samples.begin(), samples.end(),
                             [&](const Weighted& a, const Weighted& b) { return x_[a.row][f] < x_[b.row][f]; });
            if (x_[samples.front().row][f] == x_[samples.back().row][f]) continue;  // constant here
            ++considered;
            double lneg = 0, lpos = 0;
            for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
                (y_[samples[i].row] ? lpos : lneg) += samples[i].weight;
                auto v1 = x_[samples[i].row][f], v2 = x_[samples[i + 1].row][f];
                if (v1 == v2) continue;
                double rneg = node.negatives - lneg, rpos = node.positives - lpos;
                double impurity = (lneg + lpos) * gini(lneg, lpos) + (rneg + rpos) * gini(rneg, rpos);
                if (!best || impurity < best->impurity - 1e-12)
                    best = Split{f, v1 + (v2 - v1) / 2, impurity};
            }
        }
        if (!best || best->impurity >= parent - 1e-12) return std::nullopt;
        return best;
    }

    const std::vector<Sample>& x_;
    const std::vector<int>& y_;
    const ForestParams& params_;
    std::size_t mtry_;
    std::mt19937_64& rng_;
    std::vector<TreeNode> nodes_;
};

void check_labels(const std::vector<Sample>& x, const std::vector<int>& y) {
    if (x.size() != y.size()) throw InvalidInput("row and label counts differ");
    if (x.empty()) throw InvalidInput("empty training set");
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 0 && y[i] != 1) throw InvalidInput("labels must be 0 or 1");
        if (x[i].size() != x[0].size()) throw InvalidInput("rows have different feature counts");
        (y[i] ? pos : neg) = true;
    }
    if (!pos || !neg) throw InvalidInput("training set holds a single class");
}

} // namespace

Forest train_random_forest(const std::vector<Sample>& x, const std::vector<int>& y, const ForestParams& params) {
    check_labels(x, y);
    if (params.trees == 0) throw InvalidInput("forest needs at least one tree");
    const std::size_t d = x[0].size();
    if (d == 0) throw InvalidInput("rows have no features");

    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });
    std::vector<Sample> xs;
    std::vector<int> ys;
    for (auto i : order) {
        xs.push_back(x[i]);
        ys.push_back(y[i]);
    }

    std::size_t mtry = params.max_features.value_or(
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))))));
    mtry = std::clamp<std::size_t>(mtry, 1, d);

    std::vector<Tree> trees;
    for (std::size_t t = 0; t < params.trees; ++t) {
        std::seed_seq seq{static_cast<std::uint32_t>(params.seed), static_cast<std::uint32_t>(params.seed >> 32),
                          static_cast<std::uint32_t>(t)};
        std::mt19937_64 rng(seq);
        std::vector<double> weight(xs.size(), params.bootstrap ? 0.0 : 1.0);
        if (params.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
            for (std::size_t k = 0; k < xs.size(); ++k) weight[pick(rng)] += 1.0;
        }
        std::vector<Weighted> samples;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (weight[i] > 0) samples.push_back({i, weight[i]});
        trees.push_back(TreeBuilder(xs, ys, params, mtry, rng).build(std::move(samples)));
    }
    return Forest(std::move(trees), d, params);
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw InvalidInput("score and label counts differ");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    double pos = 0, neg = 0, sum = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i]) {
            ++pos;
            sum += rank[i];
        } else {
            ++neg;
        }
    }
    if (pos == 0 || neg == 0) throw InvalidInput("ROC-AUC needs both classes");
    return (sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

std::vector<std::size_t> stratified_folds(const std::vector<int>& y, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw InvalidInput("cross-validation needs k >= 2");
    std::vector<std::size_t> fold(y.size());
    std::mt19937_64 rng(seed);
    for (int cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == cls) members.push_back(i);
        if (members.size() < k)
            throw InvalidInput("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                               " rows, too few to stratify into " + std::to_string(k) + " folds");
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t j = 0; j < members.size(); ++j) fold[members[j]] = j % k;
    }
    return fold;
}

Metrics classification_metrics(const std::vector<double>& scores, const std::vector<int>& labels) {
    Metrics m;
    m.rows = scores.size();
    m.roc_auc = roc_auc(scores, labels);
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        bool predicted = scores[i] > 0.5;
        if (predicted && labels[i]) ++tp;
        else if (predicted) ++fp;
        else if (labels[i]) ++fn;
    }
    m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

CvMetrics evaluate_cv(const std::vector<Sample>& x, const std::vector<int>& y, std::size_t k, const ForestParams& params) {
    check_labels(x, y);
    auto fold = stratified_folds(y, k, params.seed);
    CvMetrics out;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<Sample> train_x, test_x;
        std::vector<int> train_y, test_y;
        for (std::size_t i = 0; i < x.size(); ++i) {
            (fold[i] == f ? test_x : train_x).push_back(x[i]);
            (fold[i] == f ? test_y : train_y).push_back(y[i]);
        }
        ForestParams p = params;
        p.seed = params.seed + 0x9E3779B97F4A7C15ULL * (f + 1);
        auto forest = train_random_forest(train_x, train_y, p);
        std::vector<double> scores;
        for (const auto& row : test_x) scores.push_back(forest.predict(row));
        out.folds.push_back(classification_metrics(scores, test_y));
    }
    for (const auto& m : out.folds) {
        out.mean.roc_auc += m.roc_auc;
        out.mean.precision += m.precision;
        out.mean.recall += m.recall;
        out.mean.f1 += m.f1;
        out.mean.rows += m.rows;
    }
    const auto n = static_cast<double>(k);
    out.mean.roc_auc /= n;
    out.mean.precision /= n;
    out.mean.recall /= n;
    out.mean.f1 /= n;
    return out;
}

} // namespace ddikg::predict

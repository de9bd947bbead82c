#include "autopv/regression_tree.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "autopv/errors.hpp"

namespace autopv {

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw InvalidDataError("regression tree needs at least one node");
}

double RegressionTree::predict_row(std::span<const double> row) const {
    std::int32_t i = 0;
    while (nodes_[i].feature >= 0) {
        const TreeNode& n = nodes_[i];
        if (static_cast<std::size_t>(n.feature) >= row.size()) {
            throw ShapeError("tree split feature " + std::to_string(n.feature) +
                             " out of range for row of width " + std::to_string(row.size()));
        }
        i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[i].value;
}

std::vector<double> RegressionTree::predict(const Matrix& X) const {
    std::vector<double> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) out[r] = predict_row(X.row(r));
    return out;
}

nlohmann::json RegressionTree::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const TreeNode& n : nodes_) {
        arr.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    }
    return arr;
}

RegressionTree RegressionTree::from_json(const nlohmann::json& j) {
    std::vector<TreeNode> nodes;
    nodes.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 5) throw IoError("malformed tree node entry");
        TreeNode n;
        n.feature = e[0].get<std::int32_t>();
        n.threshold = e[1].get<double>();
        n.left = e[2].get<std::int32_t>();
        n.right = e[3].get<std::int32_t>();
        n.value = e[4].get<double>();
        nodes.push_back(n);
    }
    return RegressionTree(std::move(nodes));
}

TreeFitContext::TreeFitContext(const Matrix& m) : X(&m) {
    order.resize(m.cols);
    for (std::size_t f = 0; f < m.cols; ++f) {
        auto& ord = order[f];
        ord.resize(m.rows);
        for (std::size_t r = 0; r < m.rows; ++r) ord[r] = static_cast<std::int32_t>(r);
        std::sort(ord.begin(), ord.end(), [&](std::int32_t a, std::int32_t b) {
            const double va = m.at(static_cast<std::size_t>(a), f);
            const double vb = m.at(static_cast<std::size_t>(b), f);
            if (va != vb) return va < vb;
            return a < b;
        });
    }
}

namespace {

struct BuildNode {
    double sum = 0.0;
    double sum_sq = 0.0;
    double weight = 0.0;
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    std::int32_t node_index = 0;
    bool splittable = false;
    std::uint64_t feature_mask = 0;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    // running left-side accumulators for the current feature sweep
    double left_sum = 0.0;
    double left_sum_sq = 0.0;
    double left_weight = 0.0;
    double prev_value = 0.0;
    bool has_prev = false;
    std::int32_t left_child = -1;
};

std::uint64_t draw_feature_mask(Rng& rng, std::size_t cols, int k) {
    std::array<int, 64> idx{};
    for (std::size_t i = 0; i < cols; ++i) idx[i] = static_cast<int>(i);
    std::uint64_t mask = 0;
    for (int j = 0; j < k; ++j) {
        const auto pick = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(j), static_cast<std::int64_t>(cols) - 1));
        std::swap(idx[static_cast<std::size_t>(j)], idx[pick]);
        mask |= std::uint64_t{1} << idx[static_cast<std::size_t>(j)];
    }
    return mask;
}

}  // namespace

RegressionTree fit_regression_tree(const TreeFitContext& ctx, std::span<const double> target,
                                   const TreeFitOptions& options) {
    const Matrix& X = *ctx.X;
    const std::size_t rows = X.rows;
    const std::size_t cols = X.cols;
    if (target.size() != rows) {
        throw ShapeError("tree target length " + std::to_string(target.size()) + " does not match " +
                         std::to_string(rows) + " rows");
    }
    if (!options.row_weight.empty() && options.row_weight.size() != rows) {
        throw ShapeError("tree row weights do not match row count");
    }
    if (options.max_depth < 1) throw InvalidDataError("tree max_depth must be at least 1");

    const bool subsample =
        options.features_per_split > 0 && static_cast<std::size_t>(options.features_per_split) < cols;
    if (subsample && options.rng == nullptr) {
        throw InvalidDataError("feature subsampling needs a random source");
    }
    if (subsample && cols > 64) {
        throw UnsupportedError("feature subsampling supports at most 64 columns");
    }

    const auto weight_of = [&](std::size_t r) {
        return options.row_weight.empty() ? 1.0 : static_cast<double>(options.row_weight[r]);
    };

    std::vector<std::int32_t> node_of(rows, -1);
    std::vector<TreeNode> nodes;
    nodes.emplace_back();

    BuildNode root;
    for (std::size_t r = 0; r < rows; ++r) {
        const double w = weight_of(r);
        if (w <= 0.0) continue;
        node_of[r] = 0;
        const double y = target[r];
        root.sum += w * y;
        root.sum_sq += w * y * y;
        root.weight += w;
        root.y_min = std::min(root.y_min, y);
        root.y_max = std::max(root.y_max, y);
    }
    if (root.weight <= 0.0) throw InsufficientDataError("tree fit needs at least one weighted row");

    std::vector<BuildNode> level{root};
    for (int depth = 0; depth < options.max_depth && !level.empty(); ++depth) {
        bool any = false;
        for (BuildNode& nb : level) {
            nb.splittable = nb.weight >= 2.0 && nb.y_min < nb.y_max;
            if (!nb.splittable) continue;
            any = true;
            if (subsample) nb.feature_mask = draw_feature_mask(*options.rng, cols, options.features_per_split);
        }
        if (!any) break;

        for (std::size_t f = 0; f < cols; ++f) {
            for (BuildNode& nb : level) {
                nb.left_sum = 0.0;
                nb.left_sum_sq = 0.0;
                nb.left_weight = 0.0;
                nb.has_prev = false;
            }
            for (const std::int32_t r : ctx.order[f]) {
                const std::int32_t ni = node_of[static_cast<std::size_t>(r)];
                if (ni < 0) continue;
                BuildNode& nb = level[static_cast<std::size_t>(ni)];
                if (!nb.splittable) continue;
                if (subsample && ((nb.feature_mask >> f) & 1u) == 0) continue;
                const double v = X.at(static_cast<std::size_t>(r), f);
                if (nb.has_prev && v > nb.prev_value && nb.left_weight > 0.0 && nb.left_weight < nb.weight) {
                    const double rw = nb.weight - nb.left_weight;
                    const double rs = nb.sum - nb.left_sum;
                    const double rq = nb.sum_sq - nb.left_sum_sq;
                    const double score = (nb.left_sum_sq - nb.left_sum * nb.left_sum / nb.left_weight) +
                                         (rq - rs * rs / rw);
                    if (score < nb.best_score) {
                        double thr = nb.prev_value + (v - nb.prev_value) / 2.0;
                        // midpoint rounding may land on v; fall back so the
                        // right side keeps every row valued at v
                        if (!(thr < v)) thr = nb.prev_value;
                        nb.best_score = score;
                        nb.best_feature = static_cast<std::int32_t>(f);
                        nb.best_threshold = thr;
                    }
                }
                const double w = weight_of(static_cast<std::size_t>(r));
                const double y = target[static_cast<std::size_t>(r)];
                nb.left_sum += w * y;
                nb.left_sum_sq += w * y * y;
                nb.left_weight += w;
                nb.prev_value = v;
                nb.has_prev = true;
            }
        }

        std::vector<BuildNode> next;
        for (BuildNode& nb : level) {
            if (!nb.splittable || nb.best_feature < 0) {
                nodes[static_cast<std::size_t>(nb.node_index)].feature = -1;
                nodes[static_cast<std::size_t>(nb.node_index)].value = nb.sum / nb.weight;
                nb.left_child = -1;
                continue;
            }
            TreeNode& out = nodes[static_cast<std::size_t>(nb.node_index)];
            out.feature = nb.best_feature;
            out.threshold = nb.best_threshold;
            out.left = static_cast<std::int32_t>(nodes.size());
            out.right = out.left + 1;
            nb.left_child = static_cast<std::int32_t>(next.size());
            BuildNode l;
            l.node_index = out.left;
            BuildNode rch;
            rch.node_index = out.right;
            next.push_back(l);
            next.push_back(rch);
            nodes.emplace_back();
            nodes.emplace_back();
        }

        for (std::size_t r = 0; r < rows; ++r) {
            const std::int32_t ni = node_of[r];
            if (ni < 0) continue;
            const BuildNode& nb = level[static_cast<std::size_t>(ni)];
            if (nb.left_child < 0) {
                node_of[r] = -1;
                continue;
            }
            const TreeNode& out = nodes[static_cast<std::size_t>(nb.node_index)];
            const bool go_left = X.at(r, static_cast<std::size_t>(out.feature)) <= out.threshold;
            const std::int32_t ci = nb.left_child + (go_left ? 0 : 1);
            node_of[r] = ci;
            BuildNode& child = next[static_cast<std::size_t>(ci)];
            const double w = weight_of(r);
            const double y = target[r];
            child.sum += w * y;
            child.sum_sq += w * y * y;
            child.weight += w;
            child.y_min = std::min(child.y_min, y);
            child.y_max = std::max(child.y_max, y);
        }
        level = std::move(next);
    }

    for (const BuildNode& nb : level) {
        nodes[static_cast<std::size_t>(nb.node_index)].feature = -1;
        nodes[static_cast<std::size_t>(nb.node_index)].value = nb.sum / nb.weight;
    }
    return RegressionTree(std::move(nodes));
}

RegressionTree fit_regression_tree(const Matrix& X, std::span<const double> target, int max_depth) {
    const TreeFitContext ctx(X);
    TreeFitOptions opt;
    opt.max_depth = max_depth;
    return fit_regression_tree(ctx, target, opt);
}

}  // namespace autopv

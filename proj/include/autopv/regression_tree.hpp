#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "autopv/matrix.hpp"
#include "autopv/rng.hpp"

namespace autopv {

/// feature < 0 marks a leaf; otherwise rows with row[feature] <= threshold go
/// to the left child.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
};

class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes);

    double predict_row(std::span<const double> row) const;
    std::vector<double> predict(const Matrix& X) const;

    const std::vector<TreeNode>& nodes() const { return nodes_; }

    nlohmann::json to_json() const;
    static RegressionTree from_json(const nlohmann::json& j);

private:
    std::vector<TreeNode> nodes_{TreeNode{}};
};

/// Feature orderings shared by every tree grown on the same matrix. Sorting
/// once per fit instead of once per node keeps ensemble fits linear in the
/// number of rows per level.
struct TreeFitContext {
    const Matrix* X = nullptr;
    // per feature: row indices ascending by value, ties by row index
    std::vector<std::vector<std::int32_t>> order;

    explicit TreeFitContext(const Matrix& X);
};

struct TreeFitOptions {
    int max_depth = 3;
    // empty means unit weight per row; entries are bootstrap counts
    std::span<const std::int32_t> row_weight;
    // how many features to consider per split; <= 0 or >= column count
    // means all of them
    int features_per_split = 0;
    // consumed only when subsampling features
    Rng* rng = nullptr;
};

/// Grows the tree level by level. Splits minimize the summed squared error of
/// the two children over midpoint thresholds between consecutive distinct
/// values; exact ties keep the lowest feature index, then the lowest
/// threshold. Nodes with a constant target stay leaves.
RegressionTree fit_regression_tree(const TreeFitContext& ctx, std::span<const double> target,
                                   const TreeFitOptions& options);

RegressionTree fit_regression_tree(const Matrix& X, std::span<const double> target, int max_depth);

}  // namespace autopv

#include "nbm/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace nbm {

NodeClustering::NodeClustering(std::vector<int> labels, int groups)
    : labels_(std::move(labels)), groups_(groups) {
    if (groups_ <= 0)
        throw ModelError("clustering needs at least one group");
    if (labels_.empty())
        throw ModelError("clustering needs at least one item");
    std::vector<int> counts(static_cast<std::size_t>(groups_), 0);
    for (int label : labels_) {
        if (label < 0 || label >= groups_)
            throw ModelError("clustering label " + std::to_string(label) +
                             " outside 0.." + std::to_string(groups_ - 1));
        ++counts[static_cast<std::size_t>(label)];
    }
    for (int g = 0; g < groups_; ++g) {
        if (counts[static_cast<std::size_t>(g)] == 0)
            throw ModelError("clustering group " + std::to_string(g) + " is empty");
    }
}

std::vector<int> NodeClustering::group_sizes() const {
    std::vector<int> counts(static_cast<std::size_t>(groups_), 0);
    for (int label : labels_) ++counts[static_cast<std::size_t>(label)];
    return counts;
}

std::vector<std::vector<int>> NodeClustering::members() const {
    std::vector<std::vector<int>> result(static_cast<std::size_t>(groups_));
    for (int i = 0; i < size(); ++i)
        result[static_cast<std::size_t>(labels_[static_cast<std::size_t>(i)])].push_back(i);
    return result;
}

Eigen::MatrixXd NodeClustering::indicator() const {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(size(), groups_);
    for (int i = 0; i < size(); ++i)
        z(i, labels_[static_cast<std::size_t>(i)]) = 1.0;
    return z;
}

SymmetricGraph::SymmetricGraph(Eigen::MatrixXd adjacency)
    : adjacency_(std::move(adjacency)) {
    const Eigen::Index n = adjacency_.rows();
    if (n == 0 || adjacency_.cols() != n)
        throw ModelError("adjacency must be square and non-empty");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (adjacency_(i, i) != 0.0)
            throw ModelError("adjacency diagonal must be zero");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = adjacency_(i, j);
            if (v != adjacency_(j, i))
                throw ModelError("adjacency must be symmetric");
            if (v != 0.0 && v != 1.0)
                throw ModelError("adjacency entries must be 0 or 1");
        }
    }
}

double SymmetricGraph::density() const {
    const double n = static_cast<double>(size());
    return adjacency_.sum() / (n * n);
}

ProbabilityMatrix::ProbabilityMatrix(Eigen::MatrixXd values)
    : values_(std::move(values)) {
    const Eigen::Index n = values_.rows();
    if (n == 0 || values_.cols() != n)
        throw ModelError("probability matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = values_(i, j);
            if (v != values_(j, i))
                throw ModelError("probability matrix must be symmetric");
            if (!(v >= 0.0 && v <= 1.0))
                throw ModelError("probability entries must lie in [0, 1]");
        }
    }
}

void NbmParameters::validate(double tol) const {
    const int n = communities.size();
    const int k = communities.groups();
    const int l = metas.size() == k ? metas.groups()
                                    : throw ModelError("meta clustering must assign every community");
    if (block_means.rows() != k || block_means.cols() != k)
        throw ModelError("block means must be K x K");
    if (profiles.rows() != n || profiles.cols() != l)
        throw ModelError("profiles must be n x L");
    for (int a = 0; a < k; ++a) {
        for (int b = a; b < k; ++b) {
            const double v = block_means(a, b);
            if (std::abs(v - block_means(b, a)) > tol)
                throw ModelError("block means must be symmetric");
            if (!(v >= -tol && v <= 1.0 + tol))
                throw ModelError("block means must lie in [0, 1]");
        }
    }
    if ((profiles.array() < -tol).any())
        throw ModelError("profiles must be nonnegative");
    // Scaling: within community k, every profile column sums to |k|.
    const auto groups = communities.members();
    for (int g = 0; g < k; ++g) {
        const auto& idx = groups[static_cast<std::size_t>(g)];
        for (int col = 0; col < l; ++col) {
            double sum = 0.0;
            for (int i : idx) sum += profiles(i, col);
            if (std::abs(sum - static_cast<double>(idx.size())) >
                tol * std::max<double>(1.0, static_cast<double>(idx.size())))
                throw ModelError("profile column " + std::to_string(col) +
                                 " of community " + std::to_string(g) +
                                 " violates the scaling convention");
        }
    }
}

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::sbm: return "sbm";
        case ModelKind::dcbm: return "dcbm";
        case ModelKind::nbm: return "nbm";
        case ModelKind::pabm: return "pabm";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "sbm") return ModelKind::sbm;
    if (lower == "dcbm") return ModelKind::dcbm;
    if (lower == "nbm") return ModelKind::nbm;
    if (lower == "pabm") return ModelKind::pabm;
    throw ModelError("unknown model kind: " + name);
}

} // namespace nbm

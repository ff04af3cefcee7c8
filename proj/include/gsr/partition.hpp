#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gsr/errors.hpp"
#include "gsr/types.hpp"

namespace gsr {

/**
 * Contiguous, non-overlapping grouping of the coefficient indices
 * {0,...,p-1} into N groups. Group g covers [offset(g), offset(g)+size(g)).
 * Immutable after construction.
 */
class GroupPartition {
public:
    GroupPartition() = default;

    explicit GroupPartition(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
        if (sizes_.empty())
            throw InvalidArgument("invalid partition: empty group size list");
        offsets_.resize(sizes_.size());
        Index p = 0;
        for (std::size_t i = 0; i < sizes_.size(); ++i) {
            if (sizes_[i] < 1)
                throw InvalidArgument("invalid partition: group " + std::to_string(i) +
                                      " has non-positive size " + std::to_string(sizes_[i]));
            offsets_[i] = p;
            p += sizes_[i];
        }
        dim_ = p;
        max_size_ = *std::max_element(sizes_.begin(), sizes_.end());
    }

    Index num_groups() const { return static_cast<Index>(sizes_.size()); }
    Index dim() const { return dim_; }
    Index size(Index g) const { return sizes_[static_cast<std::size_t>(g)]; }
    Index offset(Index g) const { return offsets_[static_cast<std::size_t>(g)]; }
    Index max_size() const { return max_size_; }
    const std::vector<Index>& sizes() const { return sizes_; }

    /// Group that contains coefficient index j.
    Index group_of(Index j) const {
        auto it = std::upper_bound(offsets_.begin(), offsets_.end(), j);
        return static_cast<Index>(it - offsets_.begin()) - 1;
    }

    auto segment(const Vector& v, Index g) const { return v.segment(offset(g), size(g)); }
    auto segment(Vector& v, Index g) const { return v.segment(offset(g), size(g)); }

    bool operator==(const GroupPartition& other) const { return sizes_ == other.sizes_; }

private:
    std::vector<Index> sizes_;
    std::vector<Index> offsets_;
    Index dim_ = 0;
    Index max_size_ = 0;
};

inline GroupPartition build_partition(std::vector<Index> sizes) {
    return GroupPartition(std::move(sizes));
}

/// Sorted set of group indices. Duplicates collapse on construction.
class ActiveSet {
public:
    ActiveSet() = default;

    explicit ActiveSet(std::vector<Index> members) : members_(std::move(members)) {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
        if (!members_.empty() && members_.front() < 0)
            throw InvalidArgument("active set: negative group index");
    }

    static ActiveSet all(Index num_groups) {
        std::vector<Index> m(static_cast<std::size_t>(num_groups));
        std::iota(m.begin(), m.end(), Index{0});
        return ActiveSet(std::move(m));
    }

    Index count() const { return static_cast<Index>(members_.size()); }
    bool empty() const { return members_.empty(); }
    const std::vector<Index>& members() const { return members_; }

    bool contains(Index g) const {
        return std::binary_search(members_.begin(), members_.end(), g);
    }

    void insert(Index g) {
        auto it = std::lower_bound(members_.begin(), members_.end(), g);
        if (it == members_.end() || *it != g) members_.insert(it, g);
    }

    bool is_subset_of(const ActiveSet& other) const {
        return std::includes(other.members_.begin(), other.members_.end(),
                             members_.begin(), members_.end());
    }

    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    bool operator==(const ActiveSet& other) const { return members_ == other.members_; }

private:
    std::vector<Index> members_;
};

/// Total coefficient count covered by the groups in `active`.
inline Index active_dim(const GroupPartition& part, const ActiveSet& active) {
    Index total = 0;
    for (Index g : active) {
        if (g >= part.num_groups())
            throw InvalidArgument("active set: group index out of range");
        total += part.size(g);
    }
    return total;
}

/**
 * Map an arbitrary (possibly non-contiguous) group labelling of the columns
 * to a contiguous partition. `labels[j]` is the group id of column j; ids
 * must form {0,...,N-1}. Returns the partition together with `perm`, where
 * perm[k] is the original column stored at internal position k.
 */
inline std::pair<GroupPartition, std::vector<Index>>
partition_from_labels(const std::vector<Index>& labels) {
    if (labels.empty()) throw InvalidArgument("invalid partition: empty label list");
    const Index n_groups = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<Index> sizes(static_cast<std::size_t>(n_groups), 0);
    for (Index l : labels) {
        if (l < 0) throw InvalidArgument("invalid partition: negative group label");
        ++sizes[static_cast<std::size_t>(l)];
    }
    for (std::size_t g = 0; g < sizes.size(); ++g)
        if (sizes[g] == 0)
            throw InvalidArgument("invalid partition: group label " + std::to_string(g) +
                                  " unused");
    GroupPartition part(sizes);
    std::vector<Index> perm;
    perm.reserve(labels.size());
    for (Index g = 0; g < n_groups; ++g)
        for (std::size_t j = 0; j < labels.size(); ++j)
            if (labels[j] == g) perm.push_back(static_cast<Index>(j));
    return {std::move(part), std::move(perm)};
}

}  // namespace gsr

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dca {

enum class Membership : std::uint8_t { Ref = 0, Eval = 1 };

/// Immutable labeled point collection. Point ids are dense row indices
/// (0..size-1) in construction order; coordinates are stored row-major
/// as 64-bit floats regardless of the on-disk precision.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t dim, std::vector<double> coords, std::vector<Membership> membership);

    // All points share one membership tag.
    PointSet(std::size_t dim, std::vector<double> coords, Membership tag);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return membership_.size(); }
    bool empty() const { return membership_.empty(); }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    Membership membership(std::size_t i) const { return membership_[i]; }

    const std::vector<double>& coords() const { return coords_; }
    const std::vector<Membership>& memberships() const { return membership_; }

    std::size_t count(Membership tag) const;

    /// Number of exact duplicate coordinate rows (rows equal to an earlier row).
    std::size_t duplicate_count() const;

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::vector<Membership> membership_;
};

/// Query points carry no membership; they are evaluated one by one against a
/// prebuilt reference context and never become part of it.
class QuerySet {
public:
    QuerySet() = default;
    QuerySet(std::size_t dim, std::vector<double> coords);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
};

/// Union with `r`'s points first (ids 0..|r|-1) followed by `e`'s. Membership
/// tags are preserved and duplicate coordinates across the two sets stay
/// distinct vertices.
PointSet merge(const PointSet& r, const PointSet& e);

} // namespace dca

#include "dca/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dca/errors.hpp"

namespace dca {

namespace {

void check_shape(std::size_t dim, const std::vector<double>& coords) {
    if (dim == 0) throw DimMismatch("point dimension must be positive");
    if (coords.size() % dim != 0)
        throw DimMismatch("coordinate buffer size is not a multiple of dim");
    for (double v : coords) {
        if (!std::isfinite(v)) throw ParseError("non-finite coordinate");
    }
}

} // namespace

PointSet::PointSet(std::size_t dim, std::vector<double> coords, std::vector<Membership> membership)
    : dim_(dim), coords_(std::move(coords)), membership_(std::move(membership)) {
    check_shape(dim_, coords_);
    if (coords_.size() != membership_.size() * dim_)
        throw DimMismatch("membership size does not match point count");
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords, Membership tag)
    : dim_(dim), coords_(std::move(coords)) {
    check_shape(dim_, coords_);
    membership_.assign(coords_.size() / dim_, tag);
}

std::size_t PointSet::count(Membership tag) const {
    return static_cast<std::size_t>(std::count(membership_.begin(), membership_.end(), tag));
}

std::size_t PointSet::duplicate_count() const {
    const std::size_t n = size();
    if (n < 2) return 0;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    auto row_less = [&](std::uint32_t a, std::uint32_t b) {
        const auto pa = point(a), pb = point(b);
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    };
    std::sort(order.begin(), order.end(), row_less);
    std::size_t dupes = 0;
    for (std::size_t k = 1; k < n; ++k) {
        const auto pa = point(order[k - 1]), pb = point(order[k]);
        if (std::equal(pa.begin(), pa.end(), pb.begin())) ++dupes;
    }
    return dupes;
}

QuerySet::QuerySet(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
    check_shape(dim_, coords_);
}

PointSet merge(const PointSet& r, const PointSet& e) {
    if (!e.empty() && r.dim() != e.dim())
        throw DimMismatch("reference and evaluation sets have different dimensions");
    std::vector<double> coords = r.coords();
    coords.insert(coords.end(), e.coords().begin(), e.coords().end());
    std::vector<Membership> tags = r.memberships();
    tags.insert(tags.end(), e.memberships().begin(), e.memberships().end());
    return PointSet(r.dim(), std::move(coords), std::move(tags));
}

} // namespace dca

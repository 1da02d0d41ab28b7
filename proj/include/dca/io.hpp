#pragma once

#include <filesystem>

#include "dca/delaunay.hpp"
#include "dca/pointset.hpp"

namespace dca {

enum class Format { Csv, Dcabin };

struct LoadOptions {
    Format format = Format::Csv;
    bool header = false; // skip the first CSV line
};

/// Picks dcabin for a ".dcabin" extension, otherwise the fallback.
Format format_from_extension(const std::filesystem::path& path, Format fallback = Format::Csv);

/// Loads a point set and tags every point. A dcabin file that carries its own
/// membership block keeps the stored tags instead. Exact duplicate rows are
/// legal and reported as a warning on stderr.
PointSet load_pointset(const std::filesystem::path& path, Membership tag,
                       const LoadOptions& options = {});

QuerySet load_queryset(const std::filesystem::path& path, const LoadOptions& options = {});

/// dcabin layout: magic "DCA1", u32 point count, u32 dim, u8 membership flag,
/// row-major little-endian f32 coordinates, then one u8 tag per point
/// (0 = reference, 1 = evaluation) when the flag is set. Coordinates that fit
/// in f32 round-trip bit-exactly.
void save_dcabin(const PointSet& points, const std::filesystem::path& path);

void save_csv(const PointSet& points, const std::filesystem::path& path);

/// Graph layout: magic "DCAG", u32 vertex count, u32 dim, u32 rays per
/// vertex, u64 edge count, per edge (u32 i, u32 j, f64 length, f64 beta_ij,
/// f64 beta_ji), then one f64 unbounded fraction per vertex. Witnesses are
/// not persisted.
void save_graph(const ApproxDelaunayGraph& graph, const std::filesystem::path& path);

ApproxDelaunayGraph load_graph(const std::filesystem::path& path);

} // namespace dca

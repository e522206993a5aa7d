#ifndef LAMGEN_DELAMINATION_HPP
#define LAMGEN_DELAMINATION_HPP

#include <utility>
#include <vector>

#include "lamgen/geometry.hpp"
#include "lamgen/layup_config.hpp"
#include "lamgen/ply_discretizer.hpp"
#include "lamgen/yarn_segmenter.hpp"

namespace lamgen {

enum class CutKind { InterfaceEdge, YarnBandEdge };

/// Where a delamination cut came from. For InterfaceEdge `value` is the line
/// offset from the ply axis; for YarnBandEdge it is the band-edge station.
struct CutProvenance {
    CutKind kind = CutKind::InterfaceEdge;
    int ply = 0;
    int strip_index = 0;
    double value = 0.0;
};

struct SuppressedCell {
    ConvexPolygon poly;
    double area = 0.0;
};

struct DelaminationCrackletSet {
    int lower_ply = 0;  // cells lie between plies lower_ply and lower_ply + 1
    std::vector<ConvexPolygon> cells;
    std::vector<SuppressedCell> suppressed;
    std::vector<CutProvenance> cuts;
};

/// Read-only view of one ply's partition.
struct PlyPartitionView {
    const PlyLayout* layout = nullptr;
    const std::vector<SegmentedYarn>* yarns = nullptr;
};

/// Two-step arrangement of the interface between two plies: full lines along
/// every interface-strip boundary of both plies, then finite yarn band-edge
/// cuts restricted to their owning yarn. Sub-threshold cells are suppressed.
DelaminationCrackletSet partition_ply_interface(const LaminateSpec& spec, int lower_ply,
                                                const PlyPartitionView& below, const PlyPartitionView& above);

/// Splits every cell by every line in order (full infinite lines).
std::vector<ConvexPolygon> arrange(std::vector<ConvexPolygon> cells, const std::vector<DirectedLine>& lines,
                                   const Tolerances& tol);

std::pair<std::vector<ConvexPolygon>, std::vector<SuppressedCell>> suppress_small(std::vector<ConvexPolygon> cells,
                                                                                  const Tolerances& tol);

/// Edges of `parts` that are not covered, over their full extent, by
/// collinear edges of `cells`. Returns (part index, edge index) pairs.
std::vector<std::pair<int, int>> projection_conformity_violations(const std::vector<ConvexPolygon>& parts,
                                                                  const std::vector<ConvexPolygon>& cells,
                                                                  const Tolerances& tol);

}  // namespace lamgen

#endif

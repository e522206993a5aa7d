#ifndef LAMGEN_MATRIX_INTERFACE_HPP
#define LAMGEN_MATRIX_INTERFACE_HPP

#include <vector>

#include "lamgen/geometry.hpp"
#include "lamgen/ply_discretizer.hpp"
#include "lamgen/yarn_segmenter.hpp"

namespace lamgen {

/// A cut across an interface strip, inherited from a band edge of one of the
/// two neighbouring yarns.
struct BifurcationStation {
    double station = 0.0;
    int yarn_strip = 0;    // strip_index of the neighbour that owns the cut
    int cut_index = 0;     // index into that yarn's CutPlan::stations
    bool upper = false;    // true for s + t_f/2, false for s - t_f/2
};

struct MatrixCrackletSet {
    int strip_index = 0;
    std::vector<BifurcationStation> stations;  // sorted, merged within coincidence_eps
    std::vector<ConvexPolygon> cells;          // ordered along the axis
};

/// Splits an interface strip at every band edge of its neighbouring yarns so
/// that cracklet boundaries match the yarn partition exactly. Either
/// neighbour may be null (interface at the laminate edge).
MatrixCrackletSet partition_interface(const Strip& iface, const DirectedLine& axis,
                                      const SegmentedYarn* lower, const SegmentedYarn* upper,
                                      const Tolerances& tol);

std::vector<MatrixCrackletSet> partition_ply_interfaces(const PlyLayout& layout,
                                                        const std::vector<SegmentedYarn>& yarns,
                                                        const Tolerances& tol);

}  // namespace lamgen

#endif

#include "lamgen/matrix_interface.hpp"

#include <algorithm>

namespace lamgen {

MatrixCrackletSet partition_interface(const Strip& iface, const DirectedLine& axis,
                                      const SegmentedYarn* lower, const SegmentedYarn* upper,
                                      const Tolerances& tol) {
    MatrixCrackletSet out;
    out.strip_index = iface.strip_index;

    std::vector<BifurcationStation> all;
    for (const SegmentedYarn* y : {lower, upper}) {
        if (!y) continue;
        for (std::size_t c = 0; c < y->plan.stations.size(); ++c) {
            const double s = y->plan.stations[c];
            all.push_back({s - 0.5 * y->plan.t_f, y->strip_index, static_cast<int>(c), false});
            all.push_back({s + 0.5 * y->plan.t_f, y->strip_index, static_cast<int>(c), true});
        }
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return a.station < b.station; });
    for (const auto& b : all)
        if (out.stations.empty() || b.station - out.stations.back().station > tol.coincidence_eps)
            out.stations.push_back(b);

    ConvexPolygon rest = iface.poly;
    for (const auto& b : out.stations) {
        auto r = split_convex(rest, axis.perpendicular_at(b.station), tol);
        if (r.left && r.right) {
            out.cells.push_back(std::move(*r.left));
            rest = std::move(*r.right);
        }
    }
    out.cells.push_back(std::move(rest));
    return out;
}

std::vector<MatrixCrackletSet> partition_ply_interfaces(const PlyLayout& layout,
                                                        const std::vector<SegmentedYarn>& yarns,
                                                        const Tolerances& tol) {
    auto yarn = [&](int j) -> const SegmentedYarn* {
        for (const auto& y : yarns)
            if (y.strip_index == j) return &y;
        return nullptr;
    };
    std::vector<MatrixCrackletSet> out;
    for (const Strip* s : layout.interfaces())
        out.push_back(partition_interface(*s, layout.axis, yarn(s->strip_index - 1), yarn(s->strip_index + 1), tol));
    return out;
}

}  // namespace lamgen

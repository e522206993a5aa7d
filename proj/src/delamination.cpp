#include "lamgen/delamination.hpp"

#include <algorithm>
#include <numeric>

#include "lamgen/spatial_index.hpp"

namespace lamgen {

namespace {

std::vector<double> unique_sorted(std::vector<double> v, double eps) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > eps) out.push_back(x);
    return out;
}

/// Splits every cell by the lines axis.offset(o) for the given sorted offsets.
std::vector<ConvexPolygon> slice(std::vector<ConvexPolygon> cells, const DirectedLine& axis,
                                 const std::vector<double>& offsets, const Tolerances& tol) {
    std::vector<ConvexPolygon> out;
    for (auto& cell : cells) {
        const auto [lo, hi] = cell.offset_range(axis);
        auto it = std::upper_bound(offsets.begin(), offsets.end(), lo + tol.coincidence_eps);
        ConvexPolygon rest = std::move(cell);
        for (; it != offsets.end() && *it < hi - tol.coincidence_eps; ++it) {
            // Left of the offset line is the higher-offset side.
            auto r = split_convex(rest, axis.offset(*it), tol);
            if (r.left && r.right) {
                out.push_back(std::move(*r.right));
                rest = std::move(*r.left);
            }
        }
        out.push_back(std::move(rest));
    }
    return out;
}

void interface_lines(const PlyPartitionView& v, std::vector<double>& offsets, std::vector<CutProvenance>& cuts) {
    for (const Strip* s : v.layout->interfaces()) {
        for (double o : {s->offset_lo, s->offset_hi}) {
            offsets.push_back(o);
            cuts.push_back({CutKind::InterfaceEdge, v.layout->ply_index, s->strip_index, o});
        }
    }
}

// A yarn's band edges cut the yarn strip and the interface strips on either
// side of it, since the matrix cracklets there inherit the same stations.
void yarn_cuts(std::vector<ConvexPolygon>& cells, const PlyPartitionView& v, std::vector<CutProvenance>& cuts,
               const Tolerances& tol) {
    const DirectedLine& axis = v.layout->axis;
    std::vector<std::pair<double, int>> by_offset(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
        by_offset[c] = {axis.signed_distance(cells[c].centroid()), static_cast<int>(c)};
    std::sort(by_offset.begin(), by_offset.end());

    std::vector<std::vector<double>> cell_edges(cells.size());
    for (const auto& y : *v.yarns) {
        if (y.plan.stations.empty()) continue;
        const Strip* strip = v.layout->find(y.strip_index);
        const auto edges = y.plan.band_edges();
        for (double s : edges) cuts.push_back({CutKind::YarnBandEdge, v.layout->ply_index, y.strip_index, s});

        double lo = strip->offset_lo, hi = strip->offset_hi;
        if (const Strip* below = v.layout->find(y.strip_index - 1)) lo = std::min(lo, below->offset_lo);
        if (const Strip* above = v.layout->find(y.strip_index + 1)) hi = std::max(hi, above->offset_hi);
        auto first = std::lower_bound(by_offset.begin(), by_offset.end(), std::pair{lo, -1});
        auto last = std::upper_bound(by_offset.begin(), by_offset.end(), std::pair{hi, static_cast<int>(cells.size())});
        for (auto it = first; it != last; ++it) {
            auto& ce = cell_edges[static_cast<std::size_t>(it->second)];
            ce.insert(ce.end(), edges.begin(), edges.end());
        }
    }

    const std::size_t n = cells.size();
    for (std::size_t c = 0; c < n; ++c) {
        if (cell_edges[c].empty()) continue;
        const auto edges = unique_sorted(std::move(cell_edges[c]), tol.coincidence_eps);
        const auto [slo, shi] = cells[c].station_range(axis);
        ConvexPolygon rest = cells[c];
        std::vector<ConvexPolygon> pieces;
        for (double s : edges) {
            if (s <= slo + tol.coincidence_eps || s >= shi - tol.coincidence_eps) continue;
            // perpendicular_at() points along +normal: its left is the lower-station side.
            auto r = split_convex(rest, axis.perpendicular_at(s), tol);
            if (r.left && r.right) {
                pieces.push_back(std::move(*r.left));
                rest = std::move(*r.right);
            }
        }
        if (pieces.empty()) continue;
        cells[c] = std::move(pieces.front());
        for (std::size_t k = 1; k < pieces.size(); ++k) cells.push_back(std::move(pieces[k]));
        cells.push_back(std::move(rest));
    }
}

}  // namespace

std::vector<ConvexPolygon> arrange(std::vector<ConvexPolygon> cells, const std::vector<DirectedLine>& lines,
                                   const Tolerances& tol) {
    for (const auto& line : lines) {
        std::vector<ConvexPolygon> next;
        next.reserve(cells.size() + 8);
        for (auto& c : cells) {
            auto r = split_convex(c, line, tol);
            if (r.left) next.push_back(std::move(*r.left));
            if (r.right) next.push_back(std::move(*r.right));
        }
        cells = std::move(next);
    }
    return cells;
}

std::pair<std::vector<ConvexPolygon>, std::vector<SuppressedCell>> suppress_small(std::vector<ConvexPolygon> cells,
                                                                                  const Tolerances& tol) {
    std::vector<ConvexPolygon> kept;
    std::vector<SuppressedCell> gone;
    for (auto& c : cells) {
        const double a = c.area();
        if (a < tol.area_threshold)
            gone.push_back({std::move(c), a});
        else
            kept.push_back(std::move(c));
    }
    return {std::move(kept), std::move(gone)};
}

DelaminationCrackletSet partition_ply_interface(const LaminateSpec& spec, int lower_ply,
                                                const PlyPartitionView& below, const PlyPartitionView& above) {
    const auto& tol = spec.tol;
    DelaminationCrackletSet out;
    out.lower_ply = lower_ply;

    std::vector<ConvexPolygon> cells{spec.rectangle()};
    for (const auto* v : {&below, &above}) {
        std::vector<double> offsets;
        interface_lines(*v, offsets, out.cuts);
        cells = slice(std::move(cells), v->layout->axis, unique_sorted(std::move(offsets), tol.coincidence_eps), tol);
    }
    for (const auto* v : {&below, &above}) yarn_cuts(cells, *v, out.cuts, tol);

    auto [kept, gone] = suppress_small(std::move(cells), tol);
    out.cells = std::move(kept);
    out.suppressed = std::move(gone);
    return out;
}

std::vector<std::pair<int, int>> projection_conformity_violations(const std::vector<ConvexPolygon>& parts,
                                                                  const std::vector<ConvexPolygon>& cells,
                                                                  const Tolerances& tol) {
    const double eps = tol.coincidence_eps;
    Box domain{1e300, 1e300, -1e300, -1e300};
    std::vector<std::pair<Vec2, Vec2>> segs;
    for (const auto& c : cells)
        for (std::size_t k = 0; k < c.size(); ++k) {
            segs.emplace_back(c.vertex(k), c.vertex(k + 1));
            const auto b = c.bounds();
            domain = {std::min(domain[0], b[0]), std::min(domain[1], b[1]), std::max(domain[2], b[2]),
                      std::max(domain[3], b[3])};
        }
    std::vector<std::pair<int, int>> bad;
    if (segs.empty()) {
        for (std::size_t p = 0; p < parts.size(); ++p)
            for (std::size_t k = 0; k < parts[p].size(); ++k) bad.emplace_back(static_cast<int>(p), static_cast<int>(k));
        return bad;
    }
    GridIndex index = GridIndex::for_items(domain, segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& [a, b] = segs[i];
        index.insert(static_cast<int>(i), segment_box(a.x, a.y, b.x, b.y));
    }

    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (std::size_t k = 0; k < parts[p].size(); ++k) {
            const Vec2 a = parts[p].vertex(k), b = parts[p].vertex(k + 1);
            const double len = distance(a, b);
            const Vec2 u = (b - a) / len;
            std::vector<std::pair<double, double>> cover;
            for (int i : index.query(segment_box(a.x, a.y, b.x, b.y), eps)) {
                const auto& [c0, c1] = segs[static_cast<std::size_t>(i)];
                if (std::abs(cross(u, c0 - a)) > eps || std::abs(cross(u, c1 - a)) > eps) continue;
                double t0 = dot(u, c0 - a), t1 = dot(u, c1 - a);
                if (t0 > t1) std::swap(t0, t1);
                t0 = std::max(t0, 0.0);
                t1 = std::min(t1, len);
                if (t1 > t0) cover.emplace_back(t0, t1);
            }
            std::sort(cover.begin(), cover.end());
            double reach = 0.0;
            for (const auto& [t0, t1] : cover) {
                if (t0 > reach + eps) break;
                reach = std::max(reach, t1);
            }
            if (reach < len - eps) bad.emplace_back(static_cast<int>(p), static_cast<int>(k));
        }
    }
    return bad;
}

}  // namespace lamgen

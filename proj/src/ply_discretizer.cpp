#include "lamgen/ply_discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lamgen {

std::vector<const Strip*> PlyLayout::yarns() const {
    std::vector<const Strip*> out;
    for (const auto& s : strips)
        if (s.role == StripRole::Yarn) out.push_back(&s);
    return out;
}

std::vector<const Strip*> PlyLayout::interfaces() const {
    std::vector<const Strip*> out;
    for (const auto& s : strips)
        if (s.role == StripRole::Interface) out.push_back(&s);
    return out;
}

const Strip* PlyLayout::find(int strip_index) const {
    for (const auto& s : strips)
        if (s.strip_index == strip_index) return &s;
    return nullptr;
}

namespace {

int floor_div2(int j) { return j >= 0 ? j / 2 : -((-j + 1) / 2); }

std::pair<double, double> strip_offsets(int j, double d, double tm) {
    const double period = d + tm;
    const int k = floor_div2(j);
    const double c = k * period;
    if (j % 2 == 0) return {c - 0.5 * d, c + 0.5 * d};
    return {c + 0.5 * d, c + 0.5 * d + tm};
}

}  // namespace

PlyLayout discretize_ply(const LaminateSpec& spec, int i) {
    const auto& ply = spec.plies.at(static_cast<std::size_t>(i));
    const auto& tol = spec.tol;
    PlyLayout layout;
    layout.ply_index = i;
    layout.axis = DirectedLine::from_angle(spec.center(), ply.theta_deg);

    const ConvexPolygon rect = spec.rectangle();
    const auto [omin, omax] = rect.offset_range(layout.axis);
    const double period = ply.d + spec.t_m;
    const int kmax = static_cast<int>(std::ceil(std::max(std::abs(omin), std::abs(omax)) / period)) + 1;

    std::map<int, Strip> kept;
    for (int j = -2 * kmax - 1; j <= 2 * kmax + 1; ++j) {
        auto [lo, hi] = strip_offsets(j, ply.d, spec.t_m);
        if (hi <= omin + tol.coincidence_eps || lo >= omax - tol.coincidence_eps) continue;
        auto poly = clip_strip(rect, layout.axis, lo, hi, tol);
        if (!poly) continue;
        Strip s;
        s.strip_index = j;
        s.role = (j % 2 == 0) ? StripRole::Yarn : StripRole::Interface;
        s.offset_lo = lo;
        s.offset_hi = hi;
        s.poly = std::move(*poly);
        kept.emplace(j, std::move(s));
    }

    // Merge sub-threshold outer strips into their inward neighbour, working
    // inward from both ends so repeated slivers collapse in one pass.
    auto merge_side = [&](int dir) {
        while (kept.size() > 1) {
            auto it = dir > 0 ? std::prev(kept.end()) : kept.begin();
            if (it->second.poly.area() >= tol.area_threshold) break;
            const int j = it->first;
            auto nb = kept.find(j - dir);
            if (nb == kept.end()) break;
            Strip& n = nb->second;
            const double lo = std::min(n.offset_lo, it->second.offset_lo);
            const double hi = std::max(n.offset_hi, it->second.offset_hi);
            auto merged = clip_strip(rect, layout.axis, lo, hi, tol);
            if (!merged) break;
            layout.notes.push_back("ply " + std::to_string(i + 1) + ": strip " + std::to_string(j) + " (area " +
                                   std::to_string(it->second.poly.area()) + " mm^2) merged into strip " +
                                   std::to_string(n.strip_index));
            n.offset_lo = lo;
            n.offset_hi = hi;
            n.poly = std::move(*merged);
            n.absorbed_sliver = true;
            kept.erase(it);
        }
    };
    merge_side(+1);
    merge_side(-1);

    for (auto& [j, s] : kept) layout.strips.push_back(std::move(s));
    return layout;
}

}  // namespace lamgen

#include "lamgen/spatial_index.hpp"

#include <algorithm>
#include <cmath>

namespace lamgen {

GridIndex::GridIndex(const Box& domain, double bucket) : domain_(domain), bucket_(bucket) {
    const double w = std::max(domain[2] - domain[0], bucket);
    const double h = std::max(domain[3] - domain[1], bucket);
    nx_ = std::clamp(static_cast<int>(std::ceil(w / bucket)), 1, 4096);
    ny_ = std::clamp(static_cast<int>(std::ceil(h / bucket)), 1, 4096);
    cells_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
}

GridIndex GridIndex::for_items(const Box& domain, std::size_t expected_items) {
    const double area = std::max((domain[2] - domain[0]) * (domain[3] - domain[1]), 1e-12);
    const double n = static_cast<double>(std::max<std::size_t>(expected_items, 1));
    return GridIndex(domain, std::sqrt(area / n));
}

std::array<int, 4> GridIndex::range(const Box& b, double pad) const {
    auto ix = [&](double x) {
        return std::clamp(static_cast<int>(std::floor((x - domain_[0]) / bucket_)), 0, nx_ - 1);
    };
    auto iy = [&](double y) {
        return std::clamp(static_cast<int>(std::floor((y - domain_[1]) / bucket_)), 0, ny_ - 1);
    };
    return {ix(b[0] - pad), iy(b[1] - pad), ix(b[2] + pad), iy(b[3] + pad)};
}

void GridIndex::insert(int id, const Box& box) {
    const auto r = range(box, 0.0);
    for (int j = r[1]; j <= r[3]; ++j)
        for (int i = r[0]; i <= r[2]; ++i) cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(id);
}

std::vector<int> GridIndex::query(const Box& box, double pad) const {
    const auto r = range(box, pad);
    std::vector<int> out;
    for (int j = r[1]; j <= r[3]; ++j)
        for (int i = r[0]; i <= r[2]; ++i) {
            const auto& c = cells_[static_cast<std::size_t>(j) * nx_ + i];
            out.insert(out.end(), c.begin(), c.end());
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace lamgen

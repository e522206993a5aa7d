#ifndef LAMGEN_SPATIAL_INDEX_HPP
#define LAMGEN_SPATIAL_INDEX_HPP

#include <array>
#include <vector>

namespace lamgen {

using Box = std::array<double, 4>;  // xmin, ymin, xmax, ymax

/// Uniform-grid bucket index over axis-aligned boxes. Good enough for the
/// roughly uniform cell sizes the partitioners produce.
class GridIndex {
public:
    GridIndex(const Box& domain, double bucket);
    /// Picks a bucket size giving about one item per bucket.
    static GridIndex for_items(const Box& domain, std::size_t expected_items);

    void insert(int id, const Box& box);
    /// Ids whose boxes may overlap `box` (expanded by pad), sorted, unique.
    [[nodiscard]] std::vector<int> query(const Box& box, double pad = 0.0) const;

private:
    [[nodiscard]] std::array<int, 4> range(const Box& b, double pad) const;
    Box domain_;
    double bucket_;
    int nx_, ny_;
    std::vector<std::vector<int>> cells_;
};

inline Box segment_box(double x0, double y0, double x1, double y1) {
    return {x0 < x1 ? x0 : x1, y0 < y1 ? y0 : y1, x0 < x1 ? x1 : x0, y0 < y1 ? y1 : y0};
}

inline bool boxes_overlap(const Box& a, const Box& b, double pad) {
    return a[0] <= b[2] + pad && b[0] <= a[2] + pad && a[1] <= b[3] + pad && b[1] <= a[3] + pad;
}

}  // namespace lamgen

#endif

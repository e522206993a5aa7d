#ifndef LAMGEN_PLY_DISCRETIZER_HPP
#define LAMGEN_PLY_DISCRETIZER_HPP

#include <string>
#include <vector>

#include "lamgen/geometry.hpp"
#include "lamgen/layup_config.hpp"

namespace lamgen {

enum class StripRole { Yarn, Interface };

/// One yarn or yarn-interface strip of a ply, clipped to the laminate
/// rectangle. Offsets are signed distances from the ply axis.
///
/// strip_index counts outward from the center yarn: yarn k has index 2k,
/// the interface between yarns k and k+1 has index 2k+1.
struct Strip {
    int strip_index = 0;
    StripRole role = StripRole::Yarn;
    double offset_lo = 0.0;
    double offset_hi = 0.0;
    ConvexPolygon poly;
    bool absorbed_sliver = false;  // a sub-threshold neighbour was merged into this strip
};

struct PlyLayout {
    int ply_index = 0;
    DirectedLine axis;             // through the laminate center at theta_i
    std::vector<Strip> strips;     // ordered by offset
    std::vector<std::string> notes;

    [[nodiscard]] std::vector<const Strip*> yarns() const;
    [[nodiscard]] std::vector<const Strip*> interfaces() const;
    /// Strip by strip_index, or nullptr when it does not intersect the laminate.
    [[nodiscard]] const Strip* find(int strip_index) const;
};

/// Tiles ply `i` of the laminate with alternating yarn (width d_i) and
/// interface (width t_m) strips, the center yarn straddling the center.
PlyLayout discretize_ply(const LaminateSpec& spec, int i);

}  // namespace lamgen

#endif

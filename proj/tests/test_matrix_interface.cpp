#include <doctest.h>

#include <random>

#include "lamgen/matrix_interface.hpp"
#include "oracles.hpp"

using namespace lamgen;

namespace {

// theta = 0 stack: lower yarn y in [0, 1], interface [1, 1 + tm], upper yarn
// above it; all 20 long.
struct Stack {
    double tm = 0.01;
    DirectedLine axis{{0.0, 0.0}, {1.0, 0.0}};
    Strip lower, iface, upper;
    Stack() {
        lower.strip_index = 0;
        lower.poly = ConvexPolygon::rectangle(0, 0, 20, 1);
        iface.strip_index = 1;
        iface.role = StripRole::Interface;
        iface.poly = ConvexPolygon::rectangle(0, 1, 20, 1 + tm);
        upper.strip_index = 2;
        upper.poly = ConvexPolygon::rectangle(0, 1 + tm, 20, 2 + tm);
    }
    SegmentedYarn cut(const Strip& y, std::vector<double> stations, double tf) const {
        CutPlan p;
        p.stations = std::move(stations);
        p.t_f = tf;
        return segment_yarn(y, axis, p, {});
    }
};

double cells_area(const MatrixCrackletSet& m) {
    double a = 0.0;
    for (const auto& c : m.cells) a += c.area();
    return a;
}

// Every cracklet corner of a neighbour lying on the interface boundary has a
// cell vertex on it.
bool corners_matched(const MatrixCrackletSet& m, const SegmentedYarn& y, const ConvexPolygon& iface, double eps) {
    for (const auto& c : y.cracklets)
        for (const auto& v : c.vertices()) {
            if (iface.boundary_distance(v) > eps) continue;
            bool hit = false;
            for (const auto& cell : m.cells)
                for (const auto& w : cell.vertices())
                    if (distance(v, w) <= eps) hit = true;
            if (!hit) return false;
        }
    return true;
}

}  // namespace

TEST_CASE("no cuts on either side: the interface is one cell") {
    Stack s;
    const auto lo = s.cut(s.lower, {}, 0.01), up = s.cut(s.upper, {}, 0.01);
    const auto m = partition_interface(s.iface, s.axis, &lo, &up, {});
    CHECK(m.cells.size() == 1);
    CHECK(m.stations.empty());
}

TEST_CASE("one cut in one neighbour: three cells") {
    Stack s;
    const auto lo = s.cut(s.lower, {7.0}, 0.01), up = s.cut(s.upper, {}, 0.01);
    const auto m = partition_interface(s.iface, s.axis, &lo, &up, {});
    REQUIRE(m.cells.size() == 3);
    CHECK(m.cells[1].bounds()[0] == doctest::Approx(6.995));
    CHECK(m.cells[1].bounds()[2] == doctest::Approx(7.005));
    CHECK(m.stations.size() == 2);
    CHECK(m.stations[0].yarn_strip == 0);
    CHECK_FALSE(m.stations[0].upper);
    CHECK(m.stations[1].upper);
}

TEST_CASE("aligned cuts on both sides merge into one band") {
    Stack s;
    const auto lo = s.cut(s.lower, {7.0}, 0.01), up = s.cut(s.upper, {7.0}, 0.01);
    const auto m = partition_interface(s.iface, s.axis, &lo, &up, {});
    CHECK(m.cells.size() == 3);
    CHECK(m.stations.size() == 2);
}

TEST_CASE("misaligned overlapping bands: four cut lines, five cells") {
    Stack s;
    const auto lo = s.cut(s.lower, {7.0}, 0.01), up = s.cut(s.upper, {7.004}, 0.01);
    const auto m = partition_interface(s.iface, s.axis, &lo, &up, {});
    CHECK(m.cells.size() == 5);
    CHECK(corners_matched(m, lo, s.iface.poly, 1e-9));
    CHECK(corners_matched(m, up, s.iface.poly, 1e-9));
}

TEST_CASE("near-coincident band edges closer than eps snap together") {
    Stack s;
    const auto lo = s.cut(s.lower, {7.0}, 0.01), up = s.cut(s.upper, {7.0 + 4e-10}, 0.01);
    const auto m = partition_interface(s.iface, s.axis, &lo, &up, {});
    CHECK(m.cells.size() == 3);
}

TEST_CASE("randomized plans: all three alignment patterns tile and match") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> st(1.0, 19.0), u(0.0, 1.0);
    int separated = 0, aligned = 0, misaligned = 0;
    for (int trial = 0; trial < 300; ++trial) {
        Stack s;
        const double tf = 0.001 + 0.02 * u(rng);
        std::vector<double> a, b;
        const double base = st(rng);
        a.push_back(base);
        const double pick = u(rng);
        double other;
        if (pick < 1.0 / 3) {
            other = base;
            ++aligned;
        } else if (pick < 2.0 / 3) {
            other = base + (u(rng) - 0.5) * 1.8 * tf;  // bands overlap
            ++misaligned;
        } else {
            other = base + (u(rng) < 0.5 ? -1.0 : 1.0) * (tf + 0.5 + u(rng));
            ++separated;
        }
        b.push_back(std::clamp(other, 0.5, 19.5));
        const auto lo = s.cut(s.lower, a, tf), up = s.cut(s.upper, b, tf);
        MatrixCrackletSet m;
        REQUIRE_NOTHROW(m = partition_interface(s.iface, s.axis, &lo, &up, {}));
        CHECK(std::abs(cells_area(m) - s.iface.poly.area()) <= 1e-9 * s.iface.poly.area());
        CHECK(corners_matched(m, lo, s.iface.poly, 1e-9));
        CHECK(corners_matched(m, up, s.iface.poly, 1e-9));
        for (std::size_t i = 1; i < m.cells.size(); ++i)
            CHECK(m.cells[i].centroid().x > m.cells[i - 1].centroid().x);
    }
    CHECK(separated > 50);
    CHECK(aligned > 50);
    CHECK(misaligned > 50);
}

TEST_CASE("whole plies: every interface tiles and matches its neighbours") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> th(-90.0, 90.0), dd(0.3, 3.0), ll(0.5, 5.0), side(2.0, 10.0);
    for (int trial = 0; trial < 40; ++trial) {
        LaminateSpec spec;
        spec.L = side(rng);
        spec.W = side(rng);
        spec.t_f = 0.01;
        spec.t_m = 0.02;
        spec.t_d = 0.005;
        spec.plies = {{th(rng), 0.2, dd(rng), ll(rng), true}};
        const auto lay = discretize_ply(spec, 0);
        const auto yarns = segment_ply(spec, lay);
        const auto sets = partition_ply_interfaces(lay, yarns, spec.tol);
        const auto ifs = lay.interfaces();
        REQUIRE(sets.size() == ifs.size());
        for (std::size_t i = 0; i < sets.size(); ++i) {
            CHECK(std::abs(cells_area(sets[i]) - ifs[i]->poly.area()) <= 1e-9 * ifs[i]->poly.area());
            for (const auto& y : yarns)
                if (std::abs(y.strip_index - sets[i].strip_index) == 1)
                    CHECK(corners_matched(sets[i], y, ifs[i]->poly, 1e-9));
        }
    }
}

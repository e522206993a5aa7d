#ifndef LAMGEN_ASSEMBLER_HPP
#define LAMGEN_ASSEMBLER_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lamgen/delamination.hpp"
#include "lamgen/geometry.hpp"
#include "lamgen/layup_config.hpp"
#include "lamgen/matrix_interface.hpp"
#include "lamgen/ply_discretizer.hpp"
#include "lamgen/yarn_segmenter.hpp"

namespace lamgen {

/// Everything the 2D stages produce for a laminate.
struct Partition {
    std::vector<PlyLayout> layouts;
    std::vector<std::vector<SegmentedYarn>> yarns;
    std::vector<std::vector<MatrixCrackletSet>> interfaces;
    std::vector<DelaminationCrackletSet> delaminations;  // N - 1 entries
    std::vector<std::string> warnings;
};

/// Runs discretization, yarn segmentation and both cracklet partitioners.
/// Plies and ply interfaces are processed on up to `threads` workers; the
/// result does not depend on the thread count.
Partition partition_laminate(const LaminateSpec& spec, int threads = 1);

enum class PartRole { YarnSegment, YarnCracklet, MatrixCracklet, DelaminationCracklet };

const char* to_string(PartRole r) noexcept;
bool is_cracklet(PartRole r) noexcept;

/// layer is the 1-based ply (or, for delamination cracklets, the 1-based
/// lower ply of the interface); strip is the 1-based yarn / interface
/// ordinal within the ply ordered by offset (0 for delamination cracklets);
/// index is the 1-based segment or cell number.
struct PartLabel {
    PartRole role = PartRole::YarnSegment;
    int layer = 1;
    int strip = 0;
    int index = 1;

    [[nodiscard]] std::string str() const;
    static std::optional<PartLabel> parse(const std::string& s);
    bool operator==(const PartLabel&) const = default;
};

/// Face ids: lateral face k is the extrusion of footprint edge k.
inline constexpr int kFaceBottom = -1;
inline constexpr int kFaceTop = -2;
std::string face_name(int face);
std::optional<int> parse_face(const std::string& s);

struct Part {
    PartLabel label;
    ConvexPolygon footprint;
    double z_lo = 0.0;
    double z_hi = 0.0;
    double theta_deg = 0.0;  // local material axis
    int slab = 0;            // 2i for ply i, 2i+1 for the interface above it

    [[nodiscard]] double volume() const { return footprint.area() * (z_hi - z_lo); }
};

struct FaceRef {
    int part = 0;
    int face = 0;
    bool operator==(const FaceRef&) const = default;
    auto operator<=>(const FaceRef&) const = default;
};

struct TieConstraint {
    FaceRef master;
    FaceRef slave;
    double overlap_area = 0.0;  // mm^2
};

struct SuppressedRecord {
    int lower_ply = 0;
    ConvexPolygon poly;
    double area = 0.0;
};

struct Model {
    Config config;
    std::vector<Part> parts;
    std::vector<TieConstraint> ties;
    std::vector<SuppressedRecord> suppressed;
    /// Boundary-condition faces (yarn segments only): x-min, x-max, y-min,
    /// y-max, z-min, z-max.
    std::map<std::string, std::vector<FaceRef>> face_sets;
    /// ply-<i>, interface-<i>: part indices.
    std::map<std::string, std::vector<int>> part_sets;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;

    [[nodiscard]] std::optional<int> find(const std::string& label) const;
    [[nodiscard]] std::string face_label(const FaceRef& f) const;
    [[nodiscard]] double slab_z_lo(int slab) const;
    [[nodiscard]] double slab_z_hi(int slab) const;
};

/// A pair of part faces in contact over a positive area.
struct Adjacency {
    FaceRef a;
    FaceRef b;
    double area = 0.0;
};

/// All abutting face pairs (a.part < b.part), found with a spatial index.
std::vector<Adjacency> find_adjacencies(const std::vector<Part>& parts, const Tolerances& tol);

/// Orders a contacting pair into a constraint: yarn segments master, then
/// yarn cracklets, then matrix cracklets; delamination cracklets are always
/// slaves of ply parts. Ties between equal roles make the face that lies
/// entirely within the other the slave.
TieConstraint orient(const std::vector<Part>& parts, const Adjacency& adj, const Tolerances& tol);

/// Builds the 3D model. Throws GeometryError when an audit finds an orphan face.
Model assemble(const Config& cfg, const Partition& partition);

/// Convenience: partition_laminate + assemble.
Model generate_model(const Config& cfg, int threads = 1);

struct ConstraintAudit {
    std::vector<Adjacency> missing;           // abutting, no constraint
    std::vector<TieConstraint> spurious;      // constraint without contact
    std::vector<FaceRef> repeated_slaves;     // slave face in more than one constraint
    std::vector<TieConstraint> role_violations;
    double volume_residual = 0.0;             // relative
    [[nodiscard]] bool ok(double volume_tol = 1e-9) const {
        return missing.empty() && spurious.empty() && repeated_slaves.empty() && role_violations.empty() &&
               volume_residual <= volume_tol;
    }
};

ConstraintAudit audit_constraints(const Model& model);

/// Text model file. Doubles are written with round-trip precision, so
/// read_model(write_model(m)) reproduces m and identical models give
/// identical bytes.
std::string write_model(const Model& model);
Model read_model(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace lamgen

#endif

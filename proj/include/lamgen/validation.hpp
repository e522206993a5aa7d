#ifndef LAMGEN_VALIDATION_HPP
#define LAMGEN_VALIDATION_HPP

/// @file validation.hpp
/// @brief Invariant checks over a generated model (and optionally its mesh),
/// collected into one report with a text and a JSON rendering.

#include <cmath>
#include <string>
#include <vector>

#include "lamgen/assembler.hpp"
#include "lamgen/mesher.hpp"

namespace lamgen {

struct SlabTiling {
    std::string name;  // ply-<i> or interface-<i>
    double covered = 0.0;   // part footprints (+ suppressed cells), mm^2
    double expected = 0.0;  // W * L
    [[nodiscard]] double residual() const { return expected > 0 ? std::abs(covered - expected) / expected : 0.0; }
};

struct OverlapViolation {
    int a = 0, b = 0;
    double area = 0.0;
};

struct ValidationReport {
    std::vector<SlabTiling> tiling;
    std::vector<OverlapViolation> overlaps;
    ConstraintAudit constraints;
    bool mesh_checked = false;
    std::vector<ConformityViolation> conformity;
    int inverted_elements = 0;
    std::vector<SuppressedRecord> suppressed;
    std::vector<std::string> warnings;  // never affect the outcome
    /// Hard failures in the order they were found; the first one is what the
    /// command line reports.
    std::vector<std::string> failures;

    double tiling_tol = 1e-9;

    [[nodiscard]] bool passed() const { return failures.empty(); }
    [[nodiscard]] double max_tiling_residual() const;
    [[nodiscard]] std::string text() const;
    [[nodiscard]] std::string json() const;
};

/// Runs every model-level check, plus conformity and element validity when a
/// mesh is given. Part names in messages use the part labels.
ValidationReport validate_model(const Model& model, const MeshedModel* mesh = nullptr);

}  // namespace lamgen

#endif

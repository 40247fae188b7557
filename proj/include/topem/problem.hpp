#pragma once

#include <cmath>
#include <variant>

#include "topem/fem.hpp"
#include "topem/grid.hpp"
#include "topem/material.hpp"

namespace topem {

/// Column linking replicates one design value down each design-strip column
/// and sums sensitivities per column (extruded 1D designs).
enum class LinkMode { none, columns };

/// Geometry of a full-width horizontal design strip, kept for the geometric
/// numerical-aperture diagnostic. thickness == 0 means the design region is
/// not strip-shaped.
struct DesignStrip {
    int startRow = 0;  ///< 1-based first row
    int thickness = 0;
};

/// Complete description of one design problem.
struct ProblemSpec {
    GridSpec grid;
    double wavelengthElements = 35.0;  ///< wavelength in element counts
    double filterRadius = 6.0;
    std::variant<DielectricSpec, PlasmonicSpec> material = DielectricSpec{};
    SourceBoundary sourceBoundary = SourceBoundary::bottom;
    LinkMode linkMode = LinkMode::none;
    bool substrate = true;
    DesignStrip strip;

    /// Physical wavenumber; the wavelength input is in element counts.
    double wavenumber() const { return 2.0 * M_PI / (wavelengthElements * grid.scale); }

    int numDesignVars() const {
        return linkMode == LinkMode::columns ? grid.nElX : grid.numDesign();
    }

    void validate() const;
};

}  // namespace topem

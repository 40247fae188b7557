#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace topem {

/// Structured quad mesh of nElX x nElY bilinear elements.
///
/// Elements and nodes are numbered column-major with the y-index running
/// fastest: element (ix,iy), 1-based, has index (ix-1)*nElY + iy. External
/// configuration (targetXY, designElements) uses 1-based indices; internal
/// node arrays are 0-based.
struct GridSpec {
    int nElX = 0;
    int nElY = 0;
    double scale = 1e-9;                ///< physical element side length [m]
    std::array<int, 2> targetXY{0, 0};  ///< 1-based (x,y) element of the focal point
    std::vector<int> designElements;    ///< 1-based column-major element indices of the design domain

    int numElements() const { return nElX * nElY; }
    int numNodes() const { return (nElX + 1) * (nElY + 1); }
    int numDesign() const { return static_cast<int>(designElements.size()); }

    /// 1-based column-major index of the target element.
    int targetElementIndex() const { return (targetXY[0] - 1) * nElY + targetXY[1]; }

    /// Throws std::invalid_argument on inconsistent dimensions or indices.
    void validate() const;
};

/// Index sets for sparse assembly, derived once per grid.
struct IndexSets {
    /// Per-element node indices (0-based), counter-clockwise in the order the
    /// element matrices expect. Row e corresponds to element e (0-based
    /// column-major).
    Eigen::Matrix<int, Eigen::Dynamic, 4> edofMat;

    /// Exterior edges as node pairs (0-based), one entry per element edge.
    /// Order: left (x=1), nodeRow1 (y-index 1), right (x=nElX+1),
    /// nodeRowLast (y-index nElY+1). The last set is the physical bottom
    /// boundary where the default plane-wave source enters.
    std::array<std::vector<std::array<int, 2>>, 4> boundaryEdges;

    const std::vector<std::array<int, 2>>& sourceEdgesBottom() const { return boundaryEdges[3]; }
    const std::vector<std::array<int, 2>>& sourceEdgesTop() const { return boundaryEdges[1]; }
};

/// Builds the element/node numbering and boundary edge sets for a grid.
IndexSets build_index_sets(const GridSpec& spec);

/// Element indices (1-based, column-major) of a horizontal design strip of
/// `thickness` rows starting at `startRow`, spanning the full width.
/// Ordered column by column, matching the replication layout used by
/// column-linked designs.
std::vector<int> lens_design_indices(int nElX, int nElY, int thickness, int startRow);

/// Embeds design variables into the full nElY x nElX element field:
/// 0 background, 1 on the substrate rows ceil(nElY*9/10)..nElY when
/// `substrate` is on, then designElements overwritten by dVs (design wins
/// where it overlaps the substrate).
///
/// If linkColumns is set, dVs holds one value per grid column (length nElX)
/// and is replicated down each design-strip column; designElements length
/// must then be a multiple of nElX.
Eigen::ArrayXXd embed_design(const Eigen::VectorXd& dVs, const GridSpec& spec,
                             bool substrate = true, bool linkColumns = false);

}  // namespace topem

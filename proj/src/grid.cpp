#include "topem/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace topem {

void GridSpec::validate() const {
    if (nElX < 1 || nElY < 1) {
        throw std::invalid_argument("GridSpec: nElX and nElY must be >= 1");
    }
    if (!(scale > 0.0)) {
        throw std::invalid_argument("GridSpec: scale must be positive");
    }
    if (targetXY[0] < 1 || targetXY[0] > nElX || targetXY[1] < 1 || targetXY[1] > nElY) {
        throw std::invalid_argument("GridSpec: targetXY outside the grid");
    }
    const long long nodes = static_cast<long long>(nElX + 1) * (nElY + 1);
    if (nodes > std::numeric_limits<int>::max()) {
        throw std::invalid_argument("GridSpec: node count exceeds index range");
    }
    std::unordered_set<int> seen;
    for (int idx : designElements) {
        if (idx < 1 || idx > numElements()) {
            throw std::invalid_argument("GridSpec: design element index " + std::to_string(idx) +
                                        " out of range");
        }
        if (!seen.insert(idx).second) {
            throw std::invalid_argument("GridSpec: duplicate design element index " +
                                        std::to_string(idx));
        }
    }
}

IndexSets build_index_sets(const GridSpec& spec) {
    spec.validate();
    const int nEX = spec.nElX;
    const int nEY = spec.nElY;

    IndexSets idx;
    idx.edofMat.resize(spec.numElements(), 4);
    for (int e = 0; e < spec.numElements(); ++e) {
        const int ix = e / nEY;
        const int iy = e % nEY;
        // First node is the one below-left in node numbering; the offsets
        // [0, nEY+1, nEY, -1] walk the quad counter-clockwise.
        const int n2 = ix * (nEY + 1) + iy + 1;
        idx.edofMat(e, 0) = n2;
        idx.edofMat(e, 1) = n2 + nEY + 1;
        idx.edofMat(e, 2) = n2 + nEY;
        idx.edofMat(e, 3) = n2 - 1;
    }

    auto node = [nEY](int ix, int iy) { return ix * (nEY + 1) + iy; };

    auto& left = idx.boundaryEdges[0];
    for (int iy = 0; iy < nEY; ++iy) left.push_back({node(0, iy), node(0, iy + 1)});

    auto& row1 = idx.boundaryEdges[1];
    for (int ix = 0; ix < nEX; ++ix) row1.push_back({node(ix, 0), node(ix + 1, 0)});

    auto& right = idx.boundaryEdges[2];
    for (int iy = 0; iy < nEY; ++iy) right.push_back({node(nEX, iy), node(nEX, iy + 1)});

    auto& rowLast = idx.boundaryEdges[3];
    for (int ix = 0; ix < nEX; ++ix) rowLast.push_back({node(ix + 1, nEY), node(ix, nEY)});

    return idx;
}

std::vector<int> lens_design_indices(int nElX, int nElY, int thickness, int startRow) {
    if (nElX < 1 || nElY < 1 || thickness < 1 || startRow < 1 ||
        startRow + thickness - 1 > nElY) {
        throw std::invalid_argument("lens_design_indices: strip exceeds the grid");
    }
    std::vector<int> out;
    out.reserve(static_cast<size_t>(nElX) * thickness);
    for (int ix = 0; ix < nElX; ++ix) {
        for (int r = 0; r < thickness; ++r) {
            out.push_back(ix * nElY + startRow + r);
        }
    }
    return out;
}

Eigen::ArrayXXd embed_design(const Eigen::VectorXd& dVs, const GridSpec& spec,
                             bool substrate, bool linkColumns) {
    const int nD = spec.numDesign();
    Eigen::VectorXd values;
    if (linkColumns) {
        if (dVs.size() != spec.nElX || nD % spec.nElX != 0) {
            throw std::invalid_argument("embed_design: linked design needs nElX values and a "
                                        "full-width design strip");
        }
        const int rows = nD / spec.nElX;
        values.resize(nD);
        for (int c = 0; c < spec.nElX; ++c) {
            values.segment(static_cast<Eigen::Index>(c) * rows, rows).setConstant(dVs[c]);
        }
    } else {
        if (dVs.size() != nD) {
            throw std::invalid_argument("embed_design: design vector length mismatch");
        }
        values = dVs;
    }

    Eigen::ArrayXXd field = Eigen::ArrayXXd::Zero(spec.nElY, spec.nElX);
    if (substrate) {
        const int first = static_cast<int>(std::ceil(spec.nElY * 9.0 / 10.0));  // 1-based row
        for (int row = first; row <= spec.nElY; ++row) {
            field.row(row - 1).setConstant(1.0);
        }
    }
    for (int i = 0; i < nD; ++i) {
        const int e = spec.designElements[i] - 1;  // 0-based column-major
        field(e % spec.nElY, e / spec.nElY) = values[i];
    }
    return field;
}

}  // namespace topem

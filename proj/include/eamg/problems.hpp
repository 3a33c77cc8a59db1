#pragma once

#include "eamg/coarsening.hpp"
#include "eamg/dense.hpp"
#include "eamg/sparse_matrix.hpp"

#include <vector>

namespace eamg {

struct Problem {
    SparseMatrix A;
    NearKernel near_kernel;
    DenseMatrix coordinates;  ///< one row per unknown (x, y, z); may be empty
};

/// Finite-difference Laplacian on the interior points of a 1D/2D/3D grid with
/// Dirichlet boundary values eliminated (3-, 5- or 7-point stencil). `dims`
/// holds 1 to 3 interior point counts. The near kernel is the constant vector.
Problem gen_poisson(const std::vector<Index>& dims);

struct ElasticityConfig {
    double young = 1.0;
    double poisson = 0.3;
    /// Nodes with x <= patch, y <= patch and z = 0 are clamped. The patch is
    /// widened to at least one element so that the clamp spans a 2x2 node
    /// square. A negative value leaves the body unconstrained.
    double patch = 0.125;
};

/// 24 x 24 stiffness of a trilinear hexahedron with edge lengths hx, hy, hz
/// (2x2x2 Gauss quadrature). Local dof order: node-major, (u, v, w) per node,
/// nodes ordered x fastest then y then z.
DenseMatrix hex8_stiffness(double hx, double hy, double hz, double young, double poisson);

/// Isotropic linear elasticity on the unit cube split into nx x ny x nz
/// trilinear hexahedra, clamped dofs removed symmetrically. The near kernel
/// holds the three translations and three rotations at node coordinates.
Problem gen_elasticity_cube(Index nx, Index ny, Index nz, const ElasticityConfig& cfg = {});

/// Six rigid-body modes evaluated at the given (x, y, z) rows; `component`
/// gives the displacement component (0, 1, 2) of each unknown.
DenseMatrix rigid_body_modes(const DenseMatrix& coordinates, const std::vector<int>& component);

}  // namespace eamg

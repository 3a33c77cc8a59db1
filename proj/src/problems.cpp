#include "eamg/problems.hpp"

#include <array>
#include <cmath>

namespace eamg {

Problem gen_poisson(const std::vector<Index>& dims) {
    if (dims.empty() || dims.size() > 3) throw Error(ErrorCode::InvalidArgument, "gen_poisson: 1 to 3 dimensions");
    for (Index d : dims)
        if (d < 1) throw Error(ErrorCode::InvalidArgument, "gen_poisson: grid dimensions must be positive");
    const Index nx = dims[0];
    const Index ny = dims.size() > 1 ? dims[1] : 1;
    const Index nz = dims.size() > 2 ? dims[2] : 1;
    const Index n = nx * ny * nz;
    const double center = 2.0 * static_cast<double>(dims.size());

    std::vector<SparseMatrix::Triplet> t;
    t.reserve(static_cast<std::size_t>(n) * (2 * dims.size() + 1));
    auto id = [&](Index i, Index j, Index k) { return i + nx * (j + ny * k); };
    for (Index k = 0; k < nz; ++k)
        for (Index j = 0; j < ny; ++j)
            for (Index i = 0; i < nx; ++i) {
                const Index row = id(i, j, k);
                t.push_back({row, row, center});
                if (i > 0) t.push_back({row, id(i - 1, j, k), -1.0});
                if (i + 1 < nx) t.push_back({row, id(i + 1, j, k), -1.0});
                if (dims.size() > 1) {
                    if (j > 0) t.push_back({row, id(i, j - 1, k), -1.0});
                    if (j + 1 < ny) t.push_back({row, id(i, j + 1, k), -1.0});
                }
                if (dims.size() > 2) {
                    if (k > 0) t.push_back({row, id(i, j, k - 1), -1.0});
                    if (k + 1 < nz) t.push_back({row, id(i, j, k + 1), -1.0});
                }
            }

    Problem p;
    p.A = SparseMatrix::from_triplets(n, n, std::move(t));
    p.near_kernel.V = DenseMatrix(n, 1, 1.0);
    p.coordinates = DenseMatrix(n, 3);
    for (Index k = 0; k < nz; ++k)
        for (Index j = 0; j < ny; ++j)
            for (Index i = 0; i < nx; ++i) {
                const Index row = id(i, j, k);
                p.coordinates(row, 0) = (i + 1.0) / (nx + 1.0);
                p.coordinates(row, 1) = dims.size() > 1 ? (j + 1.0) / (ny + 1.0) : 0.0;
                p.coordinates(row, 2) = dims.size() > 2 ? (k + 1.0) / (nz + 1.0) : 0.0;
            }
    return p;
}

DenseMatrix hex8_stiffness(double hx, double hy, double hz, double young, double poisson) {
    if (!(poisson > 0.0 && poisson < 0.5)) throw Error(ErrorCode::InvalidArgument, "Poisson ratio must lie in (0, 0.5)");
    if (!(hx > 0.0 && hy > 0.0 && hz > 0.0 && young > 0.0))
        throw Error(ErrorCode::InvalidArgument, "element size and Young's modulus must be positive");
    const double lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    const double mu = young / (2.0 * (1.0 + poisson));

    // Voigt order xx, yy, zz, xy, yz, zx with engineering shear strains.
    double D[6][6] = {};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) D[a][b] = lambda + (a == b ? 2.0 * mu : 0.0);
    for (int a = 3; a < 6; ++a) D[a][a] = mu;

    static constexpr std::array<std::array<int, 3>, 8> corner = {{
        {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1},
    }};
    const double g = 1.0 / std::sqrt(3.0);
    const double gp[2] = {-g, g};
    const double detJ = hx * hy * hz / 8.0;

    DenseMatrix K(24, 24);
    for (double xi : gp)
        for (double eta : gp)
            for (double zeta : gp) {
                double dN[8][3];
                for (int a = 0; a < 8; ++a) {
                    const double sx = corner[a][0] ? 1.0 : -1.0;
                    const double sy = corner[a][1] ? 1.0 : -1.0;
                    const double sz = corner[a][2] ? 1.0 : -1.0;
                    dN[a][0] = sx * (1 + sy * eta) * (1 + sz * zeta) / 8.0 * (2.0 / hx);
                    dN[a][1] = sy * (1 + sx * xi) * (1 + sz * zeta) / 8.0 * (2.0 / hy);
                    dN[a][2] = sz * (1 + sx * xi) * (1 + sy * eta) / 8.0 * (2.0 / hz);
                }
                double B[6][24] = {};
                for (int a = 0; a < 8; ++a) {
                    const int c = 3 * a;
                    B[0][c] = dN[a][0];
                    B[1][c + 1] = dN[a][1];
                    B[2][c + 2] = dN[a][2];
                    B[3][c] = dN[a][1];
                    B[3][c + 1] = dN[a][0];
                    B[4][c + 1] = dN[a][2];
                    B[4][c + 2] = dN[a][1];
                    B[5][c] = dN[a][2];
                    B[5][c + 2] = dN[a][0];
                }
                double DB[6][24] = {};
                for (int r = 0; r < 6; ++r)
                    for (int c = 0; c < 24; ++c)
                        for (int s = 0; s < 6; ++s) DB[r][c] += D[r][s] * B[s][c];
                for (int i = 0; i < 24; ++i)
                    for (int j = 0; j < 24; ++j) {
                        double s = 0.0;
                        for (int r = 0; r < 6; ++r) s += B[r][i] * DB[r][j];
                        K(i, j) += s * detJ;
                    }
            }
    return K;
}

DenseMatrix rigid_body_modes(const DenseMatrix& coordinates, const std::vector<int>& component) {
    const Index n = coordinates.rows();
    if (static_cast<Index>(component.size()) != n || coordinates.cols() != 3)
        throw Error(ErrorCode::DimensionMismatch, "rigid_body_modes: need n x 3 coordinates and n components");
    DenseMatrix V(n, 6);
    for (Index r = 0; r < n; ++r) {
        const double x = coordinates(r, 0), y = coordinates(r, 1), z = coordinates(r, 2);
        switch (component[r]) {
        case 0:
            V(r, 0) = 1.0;
            V(r, 4) = z;
            V(r, 5) = -y;
            break;
        case 1:
            V(r, 1) = 1.0;
            V(r, 3) = -z;
            V(r, 5) = x;
            break;
        case 2:
            V(r, 2) = 1.0;
            V(r, 3) = y;
            V(r, 4) = -x;
            break;
        default:
            throw Error(ErrorCode::InvalidArgument, "rigid_body_modes: component must be 0, 1 or 2");
        }
    }
    return V;
}

Problem gen_elasticity_cube(Index nx, Index ny, Index nz, const ElasticityConfig& cfg) {
    if (nx < 1 || ny < 1 || nz < 1) throw Error(ErrorCode::InvalidArgument, "gen_elasticity_cube: degenerate dimensions");
    const double hx = 1.0 / nx, hy = 1.0 / ny, hz = 1.0 / nz;
    const DenseMatrix Ke = hex8_stiffness(hx, hy, hz, cfg.young, cfg.poisson);
    const Index px = nx + 1, py = ny + 1, pz = nz + 1;
    const Index nnodes = px * py * pz;
    auto node = [&](Index i, Index j, Index k) { return i + px * (j + py * k); };

    std::vector<char> clamped(nnodes, 0);
    if (cfg.patch >= 0.0) {
        const double lx = std::max(cfg.patch, hx) * (1.0 + 1e-9);
        const double ly = std::max(cfg.patch, hy) * (1.0 + 1e-9);
        for (Index j = 0; j < py; ++j)
            for (Index i = 0; i < px; ++i)
                if (i * hx <= lx && j * hy <= ly) clamped[node(i, j, 0)] = 1;
    }

    std::vector<Index> free_index(3 * static_cast<std::size_t>(nnodes), -1);
    Index nfree = 0;
    for (Index a = 0; a < nnodes; ++a)
        if (!clamped[a])
            for (int c = 0; c < 3; ++c) free_index[3 * a + c] = nfree++;

    std::vector<SparseMatrix::Triplet> t;
    t.reserve(static_cast<std::size_t>(nx) * ny * nz * 576);
    for (Index k = 0; k < nz; ++k)
        for (Index j = 0; j < ny; ++j)
            for (Index i = 0; i < nx; ++i) {
                Index dofs[24];
                for (int a = 0; a < 8; ++a) {
                    const Index nd = node(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
                    for (int c = 0; c < 3; ++c) dofs[3 * a + c] = free_index[3 * nd + c];
                }
                for (int r = 0; r < 24; ++r) {
                    if (dofs[r] < 0) continue;
                    for (int c = 0; c < 24; ++c)
                        if (dofs[c] >= 0) t.push_back({dofs[r], dofs[c], Ke(r, c)});
                }
            }

    Problem p;
    p.A = SparseMatrix::from_triplets(nfree, nfree, std::move(t));
    p.coordinates = DenseMatrix(nfree, 3);
    std::vector<int> component(nfree);
    for (Index k = 0; k < pz; ++k)
        for (Index j = 0; j < py; ++j)
            for (Index i = 0; i < px; ++i) {
                const Index nd = node(i, j, k);
                for (int c = 0; c < 3; ++c) {
                    const Index d = free_index[3 * nd + c];
                    if (d < 0) continue;
                    p.coordinates(d, 0) = i * hx;
                    p.coordinates(d, 1) = j * hy;
                    p.coordinates(d, 2) = k * hz;
                    component[d] = c;
                }
            }
    p.near_kernel.V = rigid_body_modes(p.coordinates, component);
    return p;
}

}  // namespace eamg

#include "eamg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace eamg {

namespace {

struct Header {
    bool coordinate = true;
    bool symmetric = false;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

Header parse_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Parse, path + ": empty file");
    std::istringstream ss(line);
    std::string banner, object, format, field, symmetry;
    ss >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw Error(ErrorCode::Parse, path + ": missing %%MatrixMarket matrix banner");
    Header h;
    format = lower(format);
    if (format == "coordinate") h.coordinate = true;
    else if (format == "array") h.coordinate = false;
    else throw Error(ErrorCode::Parse, path + ": unsupported format '" + format + "'");
    field = lower(field);
    if (field != "real" && field != "double" && field != "integer")
        throw Error(ErrorCode::Parse, path + ": unsupported field '" + field + "'");
    symmetry = lower(symmetry);
    if (symmetry == "symmetric") h.symmetric = true;
    else if (symmetry != "general") throw Error(ErrorCode::Parse, path + ": unsupported symmetry '" + symmetry + "'");
    return h;
}

bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '%') continue;
        return true;
    }
    return false;
}

std::vector<SparseMatrix::Triplet> read_coordinate(std::istream& in, const Header& h, const std::string& path,
                                                   Index& rows, Index& cols) {
    std::string line;
    if (!next_data_line(in, line)) throw Error(ErrorCode::Parse, path + ": missing size line");
    long long r = 0, c = 0, nz = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> r >> c >> nz) || r < 0 || c < 0 || nz < 0)
            throw Error(ErrorCode::Parse, path + ": malformed size line");
    }
    rows = static_cast<Index>(r);
    cols = static_cast<Index>(c);
    std::vector<SparseMatrix::Triplet> t;
    t.reserve(static_cast<std::size_t>(h.symmetric ? 2 * nz : nz));
    for (long long k = 0; k < nz; ++k) {
        if (!next_data_line(in, line)) throw Error(ErrorCode::Parse, path + ": fewer entries than declared");
        std::istringstream ss(line);
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(ss >> i >> j >> v)) throw Error(ErrorCode::Parse, path + ": malformed entry line " + std::to_string(k + 1));
        if (i < 1 || i > r || j < 1 || j > c)
            throw Error(ErrorCode::Parse, path + ": index out of bounds at entry " + std::to_string(k + 1));
        t.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
        if (h.symmetric && i != j) t.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), v});
    }
    return t;
}

}  // namespace

SparseMatrix mm_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    Header h = parse_header(in, path);
    if (!h.coordinate) throw Error(ErrorCode::Parse, path + ": expected coordinate format for a sparse matrix");
    Index rows = 0, cols = 0;
    auto t = read_coordinate(in, h, path, rows, cols);
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

void mm_write(const std::string& path, const SparseMatrix& A) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.nrows << ' ' << A.ncols << ' ' << A.nnz() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Index i = 0; i < A.nrows; ++i)
        for (Index p = A.row_begin(i); p < A.row_end(i); ++p)
            out << (i + 1) << ' ' << (A.col_indices[p] + 1) << ' ' << A.values[p] << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

DenseMatrix mm_read_dense(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    Header h = parse_header(in, path);
    if (h.coordinate) {
        Index rows = 0, cols = 0;
        auto t = read_coordinate(in, h, path, rows, cols);
        DenseMatrix V(rows, cols);
        for (const auto& e : t) V(e.row, e.col) += e.value;
        return V;
    }
    std::string line;
    if (!next_data_line(in, line)) throw Error(ErrorCode::Parse, path + ": missing size line");
    long long r = 0, c = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> r >> c) || r < 0 || c < 0) throw Error(ErrorCode::Parse, path + ": malformed size line");
    }
    DenseMatrix V(static_cast<Index>(r), static_cast<Index>(c));
    for (Index j = 0; j < V.cols(); ++j) {
        for (Index i = (h.symmetric ? j : 0); i < V.rows(); ++i) {
            if (!next_data_line(in, line)) throw Error(ErrorCode::Parse, path + ": fewer values than declared");
            std::istringstream ss(line);
            double v = 0.0;
            if (!(ss >> v)) throw Error(ErrorCode::Parse, path + ": malformed value");
            V(i, j) = v;
            if (h.symmetric) V(j, i) = v;
        }
    }
    return V;
}

void mm_write_dense(const std::string& path, const DenseMatrix& V) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << "%%MatrixMarket matrix array real general\n";
    out << V.rows() << ' ' << V.cols() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (double v : V.data()) out << v << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace eamg

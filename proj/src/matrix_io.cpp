#include "keynmf/matrix_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "keynmf/common.hpp"

namespace keynmf {

static_assert(std::endian::native == std::endian::little,
              "matrix files are little-endian; big-endian hosts are unsupported");

namespace {

constexpr char kMagic[4] = {'K', 'N', 'M', 'F'};

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw Error("truncated matrix file: " + path.string());
    return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write matrix file: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open matrix file: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw Error("not a KNMF matrix file: " + path.string());
    auto version = get<std::uint8_t>(in, path);
    if (version != 1)
        throw Error("unsupported matrix file version " + std::to_string(version) + ": " +
                    path.string());
    return in;
}

}  // namespace

void write_dense(const std::filesystem::path& path, const DenseMatrix& m) {
    auto out = open_out(path);
    out.write(kMagic, 4);
    put<std::uint8_t>(out, 1);
    put<std::uint8_t>(out, 0);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

void write_sparse(const std::filesystem::path& path, const SparseMatrix& m) {
    auto out = open_out(path);
    out.write(kMagic, 4);
    put<std::uint8_t>(out, 1);
    put<std::uint8_t>(out, 1);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.nonZeros()));
    // row-major iteration yields (row, col) sorted order
    for (int r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            put<std::uint32_t>(out, static_cast<std::uint32_t>(it.row()));
            put<std::uint32_t>(out, static_cast<std::uint32_t>(it.col()));
            put<double>(out, it.value());
        }
    }
}

LoadedMatrix read_matrix(const std::filesystem::path& path) {
    auto in = open_in(path);
    auto flag = get<std::uint8_t>(in, path);
    LoadedMatrix result;
    auto rows = get<std::uint32_t>(in, path);
    auto cols = get<std::uint32_t>(in, path);
    if (flag == 0) {
        result.sparse = false;
        result.dense.resize(rows, cols);
        for (std::uint32_t r = 0; r < rows; ++r)
            for (std::uint32_t c = 0; c < cols; ++c) result.dense(r, c) = get<double>(in, path);
    } else if (flag == 1) {
        result.sparse = true;
        auto nnz = get<std::uint64_t>(in, path);
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(nnz);
        std::uint64_t prev_key = 0;
        for (std::uint64_t i = 0; i < nnz; ++i) {
            auto r = get<std::uint32_t>(in, path);
            auto c = get<std::uint32_t>(in, path);
            auto v = get<double>(in, path);
            if (r >= rows || c >= cols)
                throw Error("sparse entry out of bounds in " + path.string());
            std::uint64_t key = (static_cast<std::uint64_t>(r) << 32) | c;
            if (i > 0 && key <= prev_key)
                throw Error("sparse entries not sorted by (row, col) in " + path.string());
            prev_key = key;
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
        }
        result.sp.resize(rows, cols);
        result.sp.setFromTriplets(triplets.begin(), triplets.end());
    } else {
        throw Error("unknown matrix flag in " + path.string());
    }
    return result;
}

DenseMatrix read_dense(const std::filesystem::path& path) {
    auto m = read_matrix(path);
    if (m.sparse) throw Error("expected dense matrix in " + path.string());
    return m.dense;
}

SparseMatrix read_sparse(const std::filesystem::path& path) {
    auto m = read_matrix(path);
    if (!m.sparse) throw Error("expected sparse matrix in " + path.string());
    return m.sp;
}

void write_ids(const std::filesystem::path& path, const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        out += id;
        out += '\n';
    }
    write_file(path, out);
}

std::vector<std::string> read_ids(const std::filesystem::path& path) {
    std::vector<std::string> ids;
    std::string content = read_file(path);
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        ids.push_back(content.substr(start, end - start));
        start = end + 1;
    }
    return ids;
}

}  // namespace keynmf

#include "tdbem/block_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace tdbem {

namespace {

constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& out, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
    unsigned char b[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw AssemblyError("block file: truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

void save_blocks(const ToeplitzBlocks& blocks, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AssemblyError("cannot write " + path.string());
    out.write("TDBM", 4);
    put<std::uint32_t>(out, kVersion);
    put<std::int32_t>(out, static_cast<std::int32_t>(blocks.tag));
    put<std::int32_t>(out, blocks.lag_min);
    put<std::int32_t>(out, static_cast<std::int32_t>(blocks.blocks.size()));
    put<std::int32_t>(out, blocks.rows);
    put<std::int32_t>(out, blocks.cols);
    put<double>(out, blocks.dt);
    put<double>(out, blocks.row_weight_sigma);
    for (const auto& B : blocks.blocks) {
        put<std::int64_t>(out, B.nonZeros());
        for (int c = 0; c < B.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(B, c); it; ++it) {
                put<std::int64_t>(out, it.row());
                put<std::int64_t>(out, it.col());
                put<double>(out, it.value());
            }
    }
    if (!out) throw AssemblyError("write failed for " + path.string());
}

ToeplitzBlocks load_blocks(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AssemblyError("cannot read " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "TDBM", 4) != 0) throw AssemblyError("block file: bad magic");
    if (get<std::uint32_t>(in) != kVersion) throw AssemblyError("block file: unsupported version");
    ToeplitzBlocks b;
    const int tag = get<std::int32_t>(in);
    if (tag < 0 || tag > static_cast<int>(OperatorTag::Custom)) throw AssemblyError("block file: bad operator tag");
    b.tag = static_cast<OperatorTag>(tag);
    b.lag_min = get<std::int32_t>(in);
    const int count = get<std::int32_t>(in);
    b.rows = get<std::int32_t>(in);
    b.cols = get<std::int32_t>(in);
    b.dt = get<double>(in);
    b.row_weight_sigma = get<double>(in);
    if (count < 0 || b.rows < 0 || b.cols < 0) throw AssemblyError("block file: bad dimensions");
    for (int k = 0; k < count; ++k) {
        const std::int64_t nnz = get<std::int64_t>(in);
        if (nnz < 0) throw AssemblyError("block file: bad entry count");
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(nnz));
        for (std::int64_t e = 0; e < nnz; ++e) {
            const auto r = get<std::int64_t>(in), c = get<std::int64_t>(in);
            const double v = get<double>(in);
            if (r < 0 || r >= b.rows || c < 0 || c >= b.cols) throw AssemblyError("block file: entry out of range");
            trip.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
        }
        Eigen::SparseMatrix<double> B(b.rows, b.cols);
        B.setFromTriplets(trip.begin(), trip.end());
        b.blocks.push_back(std::move(B));
    }
    return b;
}

}  // namespace tdbem

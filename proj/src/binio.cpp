#include "varimotion/binio.hpp"

#include <bit>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "serialized containers are little-endian; big-endian hosts unsupported");

namespace vmo {

namespace {
constexpr char kMagic[8] = {'V', 'M', 'O', 'B', 'I', 'N', '1', '\0'};
}

BinaryWriter::BinaryWriter(const std::string& path)
    : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw std::runtime_error("cannot write file: " + path);
    raw(kMagic, sizeof(kMagic));
}

void BinaryWriter::raw(const void* data, std::size_t bytes) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!out_) throw std::runtime_error("write failed: " + path_);
}

void BinaryWriter::section(const std::string& tag, const std::vector<std::uint64_t>& dims,
                           const double* data) {
    const auto tag_len = static_cast<std::uint32_t>(tag.size());
    raw(&tag_len, sizeof(tag_len));
    raw(tag.data(), tag.size());
    const auto dim_count = static_cast<std::uint32_t>(dims.size());
    raw(&dim_count, sizeof(dim_count));
    std::uint64_t total = 1;
    for (std::uint64_t d : dims) {
        raw(&d, sizeof(d));
        total *= d;
    }
    raw(data, total * sizeof(double));
}

void BinaryWriter::section(const std::string& tag, const Eigen::MatrixXd& matrix) {
    // Stored row-major per the container contract.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = matrix;
    section(tag,
            {static_cast<std::uint64_t>(matrix.rows()), static_cast<std::uint64_t>(matrix.cols())},
            rm.data());
}

void BinaryWriter::section(const std::string& tag, const Eigen::VectorXd& vector) {
    section(tag, {static_cast<std::uint64_t>(vector.size())}, vector.data());
}

void BinaryWriter::scalar(const std::string& tag, double value) {
    section(tag, {1}, &value);
}

BinaryReader::BinaryReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot open file: " + path);
    char magic[8];
    raw(magic, sizeof(magic));
    for (int i = 0; i < 8; ++i) {
        if (magic[i] != kMagic[i]) throw std::runtime_error("bad magic in " + path);
    }
}

void BinaryReader::raw(void* data, std::size_t bytes) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (in_.gcount() != static_cast<std::streamsize>(bytes)) {
        throw std::runtime_error("truncated file: " + path_);
    }
}

std::string BinaryReader::next_tag() {
    const auto pos = in_.tellg();
    std::uint32_t tag_len = 0;
    in_.read(reinterpret_cast<char*>(&tag_len), sizeof(tag_len));
    if (in_.gcount() == 0) {
        in_.clear();
        return "";
    }
    if (in_.gcount() != sizeof(tag_len)) throw std::runtime_error("truncated file: " + path_);
    std::string tag(tag_len, '\0');
    raw(tag.data(), tag_len);
    in_.seekg(pos);
    return tag;
}

void BinaryReader::read_header(const std::string& expected_tag, std::vector<std::uint64_t>& dims) {
    std::uint32_t tag_len = 0;
    raw(&tag_len, sizeof(tag_len));
    if (tag_len > 4096) throw std::runtime_error("corrupt section header in " + path_);
    std::string tag(tag_len, '\0');
    raw(tag.data(), tag_len);
    if (tag != expected_tag) {
        throw std::runtime_error("expected section '" + expected_tag + "', found '" + tag +
                                 "' in " + path_);
    }
    std::uint32_t dim_count = 0;
    raw(&dim_count, sizeof(dim_count));
    if (dim_count > 8) throw std::runtime_error("corrupt section header in " + path_);
    dims.resize(dim_count);
    for (auto& d : dims) raw(&d, sizeof(d));
}

Eigen::MatrixXd BinaryReader::matrix(const std::string& tag) {
    std::vector<std::uint64_t> dims;
    read_header(tag, dims);
    if (dims.size() != 2) throw std::runtime_error("section '" + tag + "' is not a matrix");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
        static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
    raw(rm.data(), dims[0] * dims[1] * sizeof(double));
    return rm;
}

Eigen::VectorXd BinaryReader::vector(const std::string& tag) {
    std::vector<std::uint64_t> dims;
    read_header(tag, dims);
    if (dims.size() != 1) throw std::runtime_error("section '" + tag + "' is not a vector");
    Eigen::VectorXd v(static_cast<Eigen::Index>(dims[0]));
    raw(v.data(), dims[0] * sizeof(double));
    return v;
}

double BinaryReader::scalar(const std::string& tag) {
    const Eigen::VectorXd v = vector(tag);
    if (v.size() != 1) throw std::runtime_error("section '" + tag + "' is not a scalar");
    return v[0];
}

} // namespace vmo

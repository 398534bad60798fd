#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace vmo {

// Binary container shared by every serialized model:
//   8-byte magic "VMOBIN1\0", then tagged sections. Each section is
//   [u32 tag length][tag bytes][u32 dim count][u64 dims...][payload f64...],
//   payload length = product of dims, doubles little-endian, row-major.
// Big-endian hosts are rejected at compile time; all supported targets are
// little-endian.
class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path);

    void section(const std::string& tag, const std::vector<std::uint64_t>& dims,
                 const double* data);
    void section(const std::string& tag, const Eigen::MatrixXd& matrix);
    void section(const std::string& tag, const Eigen::VectorXd& vector);
    void scalar(const std::string& tag, double value);

private:
    std::ofstream out_;
    std::string path_;
    void raw(const void* data, std::size_t bytes);
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string& path);

    // Reads the next section; throws if the tag does not match.
    Eigen::MatrixXd matrix(const std::string& tag);
    Eigen::VectorXd vector(const std::string& tag);
    double scalar(const std::string& tag);

    // Peek at the next section's tag ("" at end of file).
    std::string next_tag();

private:
    std::ifstream in_;
    std::string path_;
    void raw(void* data, std::size_t bytes);
    void read_header(const std::string& expected_tag, std::vector<std::uint64_t>& dims);
};

} // namespace vmo

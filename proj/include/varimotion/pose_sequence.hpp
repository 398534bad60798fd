#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace vmo {

// Time-ordered pose codes alpha_0..alpha_T at a nominal frame rate.
struct PoseSequence {
    std::vector<Eigen::VectorXd> codes;
    double frame_rate = 30.0;

    int frame_count() const { return static_cast<int>(codes.size()); }
    int pose_dim() const { return codes.empty() ? 0 : static_cast<int>(codes.front().size()); }
};

// Line-delimited text: "pose_sequence <d_pose> <frame_rate>" header, then one
// frame of decimal values per line.
void save_sequence(const PoseSequence& seq, const std::string& path);
PoseSequence load_sequence(const std::string& path);

} // namespace vmo

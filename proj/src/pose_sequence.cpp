#include "varimotion/pose_sequence.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vmo {

void save_sequence(const PoseSequence& seq, const std::string& path) {
    if (seq.codes.empty()) throw std::runtime_error("cannot save an empty pose sequence");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "pose_sequence " << seq.pose_dim() << " ";
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", seq.frame_rate);
    out << buffer << "\n";
    for (const auto& frame : seq.codes) {
        if (frame.size() != seq.pose_dim()) {
            throw std::runtime_error("pose sequence has inconsistent frame dimensions");
        }
        for (Eigen::Index i = 0; i < frame.size(); ++i) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", frame[i]);
            out << (i ? " " : "") << buffer;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

PoseSequence load_sequence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty sequence file '" + path + "'");
    std::istringstream header(line);
    std::string tag;
    int dim = 0;
    PoseSequence seq;
    if (!(header >> tag >> dim >> seq.frame_rate) || tag != "pose_sequence" || dim <= 0) {
        throw std::runtime_error("bad sequence header in '" + path + "'");
    }
    int line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        std::istringstream row(line);
        Eigen::VectorXd frame(dim);
        for (int i = 0; i < dim; ++i) {
            if (!(row >> frame[i])) {
                throw std::runtime_error(path + ":" + std::to_string(line_number) +
                                         ": expected " + std::to_string(dim) + " values");
            }
        }
        seq.codes.push_back(std::move(frame));
    }
    if (seq.codes.empty()) throw std::runtime_error("sequence file '" + path + "' has no frames");
    return seq;
}

} // namespace vmo

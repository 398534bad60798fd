#include "varimotion/obj_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vmo {

namespace {

[[noreturn]] void fail(const std::string& path, int line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

// Parses the leading vertex index of an `f` token ("7", "7/1", "7//3", "7/1/3").
int parse_face_index(const std::string& token, const std::string& path, int line_no) {
    size_t end = token.find('/');
    const std::string head = token.substr(0, end);
    int idx = 0;
    try {
        size_t consumed = 0;
        idx = std::stoi(head, &consumed);
        if (consumed != head.size()) throw std::invalid_argument(head);
    } catch (const std::exception&) {
        fail(path, line_no, "malformed face index '" + token + "'");
    }
    if (idx <= 0) fail(path, line_no, "non-positive face index " + std::to_string(idx));
    return idx;
}

} // namespace

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open OBJ file: " + path);

    TriMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Eigen::Vector3d v;
            if (!(ss >> v[0] >> v[1] >> v[2])) fail(path, line_no, "malformed vertex record");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string token;
            while (ss >> token) poly.push_back(parse_face_index(token, path, line_no) - 1);
            if (poly.size() < 3) fail(path, line_no, "face with fewer than 3 vertices");
            for (int idx : poly) {
                if (idx >= mesh.vertex_count())
                    fail(path, line_no, "face index exceeds vertex count");
            }
            for (size_t k = 1; k + 1 < poly.size(); ++k) {
                mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
            }
        }
        // vn/vt/o/g/s/usemtl/mtllib and anything else: ignored.
    }
    return mesh;
}

void save_obj(const TriMesh& mesh, const std::string& path) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw std::runtime_error("cannot write OBJ file: " + path);
    for (const auto& v : mesh.vertices) {
        std::fprintf(out, "v %.9g %.9g %.9g\n", v[0], v[1], v[2]);
    }
    for (const auto& f : mesh.faces) {
        std::fprintf(out, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    std::fclose(out);
}

} // namespace vmo

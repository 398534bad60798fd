#include "varimotion/cli.hpp"

#include "varimotion/apps.hpp"
#include "varimotion/decoder_io.hpp"
#include "varimotion/mogen.hpp"
#include "varimotion/obj_io.hpp"
#include "varimotion/rng.hpp"
#include "varimotion/skinned_body.hpp"
#include "varimotion/synth.hpp"
#include "varimotion/varishape.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace vmo {

namespace {

std::string fmt(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

// At most one writer per output directory.
class OutDirLock {
public:
    explicit OutDirLock(const fs::path& dir) : path_(dir / ".lock") {
        fs::create_directories(dir);
        std::ofstream probe(path_, std::ios::out | std::ios::app);
        if (fs::exists(path_) && fs::file_size(path_) > 0) {
            throw std::runtime_error("output directory '" + dir.string() +
                                     "' is locked by another writer (stale '" + path_.string() +
                                     "'? remove it)");
        }
        std::ofstream lock(path_);
        lock << "locked\n";
    }
    ~OutDirLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }

private:
    fs::path path_;
};

fs::path out_dir(const RunConfig& config) {
    return fs::path(config.get_string("run.out_dir", "out"));
}

std::shared_ptr<SkinnedBody> build_body(const RunConfig& config) {
    SkinnedBody::Config body;
    body.rings = config.get_int("body.rings", 9);
    body.segments = config.get_int("body.segments", 10);
    return std::make_shared<SkinnedBody>(SkinnedBody::build(body));
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (!token.empty()) values.push_back(std::stod(token));
    }
    return values;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    for (double v : parse_double_list(text)) values.push_back(static_cast<int>(v));
    return values;
}

VarifoldKernel make_kernel(const RunConfig& config, double diag) {
    const std::vector<double> fracs =
        parse_double_list(config.get_string("kernel.sigma_fracs", "0.15"));
    VarifoldKernel kernel;
    for (double f : fracs) {
        kernel.sigmas.push_back(f * diag);
        kernel.weights.push_back(1.0);
    }
    kernel.validate();
    return kernel;
}

Dataset build_dataset(const RunConfig& config, const Decoder& body) {
    DatasetConfig dc;
    dc.count = config.get_int("data.count", 100);
    dc.frames_per_sequence = config.get_int("data.frames_per_sequence", 5);
    dc.corruption.hole_count = config.get_int("data.hole_count", 1);
    dc.corruption.hole_radius_frac = config.get_double("data.hole_radius_frac", 0.03);
    dc.corruption.jitter_sigma_frac = config.get_double("data.jitter_sigma_frac", 0.002);
    dc.corruption.drop_face_frac = config.get_double("data.drop_face_frac", 0.005);
    dc.subdivide_fraction = config.get_double("data.subdivide_fraction", 0.3);
    const std::uint64_t seed =
        Rng(config.get_u64("run.seed", 1)).substream("data").next_u64();
    return make_dataset(body, dc, seed);
}

std::shared_ptr<Decoder> fit_g(const RunConfig& config, const Dataset& dataset,
                               std::ostream& log) {
    const int dim = config.get_int("affine.dim", 60);
    const int samples =
        std::min<int>(config.get_int("affine.samples", 150),
                      static_cast<int>(dataset.train_indices.size()));
    if (samples <= dim) {
        throw std::runtime_error("not enough training meshes (" + std::to_string(samples) +
                                 ") to fit a " + std::to_string(dim) + "-dim affine decoder");
    }
    std::vector<TriMesh> meshes;
    meshes.reserve(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        meshes.push_back(dataset.items[static_cast<size_t>(dataset.train_indices[i])].registered);
    }
    AffineFit fit = fit_affine(meshes, dim);
    log << "affine decoder: dim " << dim << ", explained variance of last component "
        << fit.explained_variance[dim - 1] << "\n";
    return std::make_shared<AffineDecoder>(std::move(fit.decoder));
}

std::vector<PoseSequence> mogen_sequences(const RunConfig& config, int pose_dim,
                                          const std::string& stream, int count) {
    Rng rng = Rng(config.get_u64("run.seed", 1)).substream(stream);
    std::vector<PoseSequence> sequences;
    sequences.reserve(static_cast<size_t>(count));
    const int frames = config.get_int("mogen.frames", 10);
    for (int s = 0; s < count; ++s) {
        MotionSpec spec;
        spec.kind = static_cast<MotionKind>(s % 3);
        spec.frames = frames;
        spec.seed = rng.substream("seq-" + std::to_string(s)).next_u64();
        sequences.push_back(generate_motion(spec, pose_dim));
    }
    return sequences;
}

std::string varishape_bundle(const RunConfig& config) {
    return config.get_string("varishape.bundle", (out_dir(config) / "varishape.bin").string());
}

std::string mogen_bundle(const RunConfig& config) {
    return config.get_string("mogen.bundle", (out_dir(config) / "mogen.bin").string());
}

std::string require(const RunConfig& config, const std::string& key) {
    const std::string value = config.get_string(key, "");
    if (value.empty()) throw std::runtime_error("missing required config key '" + key + "'");
    return value;
}

void write_sequence_outputs(const RunConfig& config, const std::string& name,
                            const PoseSequence& seq, std::ostream& log) {
    const fs::path out = out_dir(config);
    const fs::path seq_path = out / (name + "_seq.txt");
    save_sequence(seq, seq_path.string());
    log << "wrote " << seq_path.string() << " (" << seq.frame_count() << " frames)\n";

    if (config.get_int("run.decode_frames", 1) == 0) return;
    const auto body = build_body(config);
    const fs::path frames_dir = out / (name + "_frames");
    fs::create_directories(frames_dir);
    Eigen::VectorXd code(body->latent_dim());
    code.tail(body->latent_dim() - body->pose_dim()).setOnes();
    std::ofstream manifest(out / (name + "_manifest.txt"));
    for (int i = 0; i < seq.frame_count(); ++i) {
        code.head(body->pose_dim()) = seq.codes[static_cast<size_t>(i)];
        char file[32];
        std::snprintf(file, sizeof(file), "frame_%04d.obj", i);
        const fs::path path = frames_dir / file;
        save_obj(body->decode(code), path.string());
        manifest << path.string() << "\n";
    }
    log << "wrote " << seq.frame_count() << " frames under " << frames_dir.string() << "\n";
}

PoseSequence linear_pose_interpolation(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                       int steps) {
    PoseSequence out;
    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / (steps - 1);
        out.codes.push_back(a + t * (b - a));
    }
    return out;
}

double mean_rms_pose_error(const PoseSequence& predicted, const PoseSequence& truth, int begin,
                           int end) {
    double total = 0.0;
    for (int i = begin; i < end; ++i) {
        const Eigen::VectorXd diff =
            predicted.codes[static_cast<size_t>(i)] - truth.codes[static_cast<size_t>(i)];
        total += std::sqrt(diff.squaredNorm() / diff.size());
    }
    return total / (end - begin);
}

} // namespace

void cmd_gen_data(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);
    const fs::path data_dir = out / "data";
    fs::create_directories(data_dir);

    const auto body = build_body(config);
    const Dataset dataset = build_dataset(config, *body);

    std::ofstream manifest(data_dir / "manifest.txt");
    for (size_t i = 0; i < dataset.items.size(); ++i) {
        const DatasetItem& item = dataset.items[i];
        char raw_name[32], reg_name[32];
        std::snprintf(raw_name, sizeof(raw_name), "raw_%04zu.obj", i);
        std::snprintf(reg_name, sizeof(reg_name), "reg_%04zu.obj", i);
        save_obj(item.raw, (data_dir / raw_name).string());
        save_obj(item.registered, (data_dir / reg_name).string());
        manifest << raw_name << " " << reg_name;
        const Eigen::VectorXd code = item.code.concat();
        for (Eigen::Index k = 0; k < code.size(); ++k) manifest << " " << fmt(code[k]);
        manifest << "\n";
    }

    std::ofstream split(data_dir / "split.txt");
    for (int i : dataset.train_indices) split << "train " << i << "\n";
    for (int i : dataset.test_indices) split << "test " << i << "\n";

    // One pose-sequence file per generated sequence, for the motion commands.
    int seq_index = -1;
    PoseSequence current;
    auto flush = [&]() {
        if (seq_index < 0 || current.codes.empty()) return;
        char name[32];
        std::snprintf(name, sizeof(name), "seq_%04d.txt", seq_index);
        save_sequence(current, (data_dir / name).string());
    };
    for (const DatasetItem& item : dataset.items) {
        if (item.sequence != seq_index) {
            flush();
            seq_index = item.sequence;
            current = PoseSequence{};
        }
        current.codes.push_back(item.code.pose);
    }
    flush();

    log << "generated " << dataset.items.size() << " meshes (" << dataset.train_indices.size()
        << " train / " << dataset.test_indices.size() << " test) under " << data_dir.string()
        << "\n";
}

void cmd_train_varishape(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);

    const auto body = build_body(config);
    const Dataset dataset = build_dataset(config, *body);
    const auto g = fit_g(config, dataset, log);
    const VarifoldKernel kernel = make_kernel(config, bbox_diagonal(body->template_mesh()));

    VariShapeTrainConfig train;
    train.hidden = parse_int_list(config.get_string("varishape.hidden", "192,192"));
    train.warm_epochs = config.get_int("varishape.warm_epochs", 200);
    train.fine_epochs = config.get_int("varishape.fine_epochs", 20);
    train.batch_size = config.get_int("varishape.batch_size", 32);
    train.warm_adam.learning_rate = config.get_double("varishape.warm_lr", 1e-3);
    train.fine_adam.learning_rate = config.get_double("varishape.fine_lr", 2e-4);
    train.seed = Rng(config.get_u64("run.seed", 1)).substream("varishape").next_u64();

    VariShapeHistory history;
    const VariShapeModel model = train_varishape(g, body, kernel, dataset, train, &history);
    model.save(varishape_bundle(config));

    std::ofstream hist(out / "varishape_history.txt");
    for (size_t e = 0; e < history.warm_loss.size(); ++e) {
        hist << "warm\t" << e << "\t" << fmt(history.warm_loss[e]) << "\n";
    }
    for (size_t e = 0; e < history.fine_loss.size(); ++e) {
        hist << "fine\t" << e << "\t" << fmt(history.fine_loss[e]) << "\n";
    }
    log << "trained varishape on " << dataset.train_indices.size() << " meshes; bundle at "
        << varishape_bundle(config) << "\n";
    if (!history.fine_loss.empty()) {
        log << "final vertex MSE " << history.fine_loss.back() << "\n";
    }
}

void cmd_train_mogen(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);

    const auto body = build_body(config);
    const int sequences = config.get_int("mogen.sequences", 240);
    const auto all = mogen_sequences(config, body->pose_dim(), "mogen-data", sequences);
    const int train_count = (sequences * 4) / 5;
    const std::vector<PoseSequence> train_seqs(all.begin(), all.begin() + train_count);
    const auto windows = extract_minisequences(train_seqs, config.get_int("mogen.T", 4),
                                               config.get_int("mogen.stride", 2));

    MogenDims dims;
    dims.pose_dim = body->pose_dim();
    dims.lifted_dim = config.get_int("mogen.lifted_dim", 4 * dims.pose_dim);
    dims.f_hidden = parse_int_list(config.get_string("mogen.f_hidden", "256,256"));
    dims.pi_hidden = parse_int_list(config.get_string("mogen.pi_hidden", "256,256"));
    MogenModel model =
        make_mogen(dims, Rng(config.get_u64("run.seed", 1)).substream("mogen-init").next_u64());

    MogenTrainConfig train;
    train.epochs = config.get_int("mogen.epochs", 300);
    train.batch_size = config.get_int("mogen.batch_size", 16);
    train.adam.learning_rate = config.get_double("mogen.lr", 1e-3);
    train.seed = Rng(config.get_u64("run.seed", 1)).substream("mogen-train").next_u64();
    const auto history = train_mogen(model, windows, train);

    model.save(mogen_bundle(config));
    std::ofstream hist(out / "mogen_history.txt");
    for (size_t e = 0; e < history.size(); ++e) hist << e << "\t" << fmt(history[e]) << "\n";
    log << "trained mogen on " << windows.size() << " windows; final loss "
        << (history.empty() ? 0.0 : history.back()) << "; bundle at " << mogen_bundle(config)
        << "\n";
}

void cmd_retrieve(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);
    const VariShapeModel model = VariShapeModel::load(varishape_bundle(config));
    const TriMesh query = load_obj(require(config, "retrieve.mesh"));
    const LatentCode code = model.retrieve(query);

    std::ofstream text(out / "retrieve_code.txt");
    text << "pose";
    for (Eigen::Index i = 0; i < code.pose.size(); ++i) text << " " << fmt(code.pose[i]);
    text << "\nshape";
    for (Eigen::Index i = 0; i < code.shape.size(); ++i) text << " " << fmt(code.shape[i]);
    text << "\n";
    save_obj(model.f().decode(code.concat()), (out / "retrieve_recon.obj").string());
    log << "wrote " << (out / "retrieve_code.txt").string() << " and "
        << (out / "retrieve_recon.obj").string() << "\n";
}

void cmd_interp(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);
    const MogenModel model = MogenModel::load(mogen_bundle(config));
    const PoseSequence seq = load_sequence(require(config, "interp.seq"));
    const int steps = config.get_int("interp.steps", seq.frame_count());
    PoseSequence result = interpolate(model, seq.codes.front(), seq.codes.back(), steps);
    result.frame_rate = seq.frame_rate;
    write_sequence_outputs(config, "interp", result, log);
}

void cmd_extrap(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);
    const MogenModel model = MogenModel::load(mogen_bundle(config));
    const PoseSequence seq = load_sequence(require(config, "extrap.seq"));
    if (seq.frame_count() < 2) throw std::runtime_error("extrapolation needs >= 2 input frames");
    const int steps = config.get_int("extrap.steps", seq.frame_count());
    PoseSequence result = extrapolate(model, seq.codes[0], seq.codes[1], steps);
    result.frame_rate = seq.frame_rate;
    write_sequence_outputs(config, "extrap", result, log);
}

void cmd_transfer(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);
    const MogenModel model = MogenModel::load(mogen_bundle(config));
    const PoseSequence motion = load_sequence(require(config, "transfer.seq"));
    const PoseSequence target = load_sequence(require(config, "transfer.target_seq"));
    const int frame = config.get_int("transfer.target_frame", 0);
    if (frame < 0 || frame >= target.frame_count()) {
        throw std::runtime_error("transfer.target_frame out of range");
    }

    BodyMotion source;
    source.identity = Eigen::VectorXd::Ones(10);
    source.poses = motion;
    const BodyMotion transferred =
        transfer_lifted(source, target.codes[static_cast<size_t>(frame)], model);
    write_sequence_outputs(config, "transfer", transferred.poses, log);
}

void cmd_sample(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);
    const MogenModel model = MogenModel::load(mogen_bundle(config));
    const auto body = build_body(config);
    const Dataset dataset = build_dataset(config, *body);

    const int train_count = static_cast<int>(dataset.train_indices.size());
    Eigen::MatrixXd lifted(model.lifted_dim(), train_count);
    Eigen::MatrixXd shapes(body->latent_dim() - body->pose_dim(), train_count);
    for (int i = 0; i < train_count; ++i) {
        const DatasetItem& item = dataset.items[static_cast<size_t>(dataset.train_indices[i])];
        lifted.col(i) = model.lift(item.code.pose);
        shapes.col(i) = item.code.shape;
    }
    const double scale = config.get_double("sample.bandwidth_scale", 1.0);
    const KdeModel kde_pose = fit_kde(lifted, scale);
    const KdeModel kde_shape = fit_kde(shapes, scale);

    const int count = config.get_int("sample.count", 10);
    Rng master = Rng(config.get_u64("run.seed", 1)).substream("sample");
    std::ofstream manifest(out / "sample_manifest.txt");
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = master.substream("body-" + std::to_string(i)).next_u64();
        const TriMesh mesh = generate_body(kde_pose, kde_shape, model, *body, seed);
        char name[32];
        std::snprintf(name, sizeof(name), "sample_%03d.obj", i);
        save_obj(mesh, (out / name).string());
        manifest << name << "\n";
    }
    log << "generated " << count << " bodies under " << out.string() << "\n";
}

void cmd_interp4d(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);
    const MogenModel model = MogenModel::load(mogen_bundle(config));
    const PoseSequence seq_a = load_sequence(require(config, "interp4d.seq_a"));
    const PoseSequence seq_b = load_sequence(require(config, "interp4d.seq_b"));
    const double s = config.get_double("interp4d.s", 0.5);
    const int frames = config.get_int("interp4d.frames", seq_a.frame_count());
    const std::string scheme_name = config.get_string("interp4d.scheme", "line");
    Blend4d scheme;
    if (scheme_name == "line") {
        scheme = Blend4d::kLine;
    } else if (scheme_name == "pointwise") {
        scheme = Blend4d::kPointwise;
    } else {
        throw std::runtime_error("interp4d.scheme must be 'line' or 'pointwise'");
    }
    const PoseSequence result = interpolate_4d(seq_a, seq_b, s, frames, model, scheme);
    write_sequence_outputs(config, "interp4d", result, log);
}

void cmd_eval(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);
    const auto body = build_body(config);
    const Dataset dataset = build_dataset(config, *body);

    std::ofstream metrics(out / "metrics.txt");
    std::ofstream timing(out / "timing.txt");
    auto metric = [&](const std::string& name, double value) {
        metrics << name << "\t" << fmt(value) << "\n";
        log << name << "\t" << fmt(value) << "\n";
    };

    if (config.get_int("eval.varishape", 1) != 0) {
        const VariShapeModel model = VariShapeModel::load(varishape_bundle(config));
        const RetrievalMetrics rm = evaluate(model, dataset, dataset.test_indices);
        metric("varishape.mean_vertex_dist", rm.mean_vertex_dist);
        metric("varishape.chamfer_error", rm.chamfer_error);
        metric("varishape.varifold_error", rm.varifold_error);
        metric("varishape.varifold_error_normalized", rm.varifold_error_normalized);
        // Reference row: the self-distance of a perfect retrieval is zero.
        metric("reference.varifold_self", 0.0);
        timing << "varishape.wall_time_per_1k\t" << rm.wall_time_per_1k << "\n";

        const int baseline_count =
            std::min<int>(config.get_int("eval.baseline_count", 3),
                          static_cast<int>(dataset.test_indices.size()));
        const int iters = config.get_int("eval.chamfer_iters", 200);
        if (baseline_count > 0) {
            Eigen::VectorXd init = Eigen::VectorXd::Zero(body->latent_dim());
            init.tail(body->latent_dim() - body->pose_dim()).setOnes();
            double baseline_err = 0.0, baseline_seconds = 0.0;
            for (int i = 0; i < baseline_count; ++i) {
                const DatasetItem& item =
                    dataset.items[static_cast<size_t>(dataset.test_indices[i])];
                const ChamferSearchResult res = chamfer_search(*body, item.raw, init, iters);
                const TriMesh recon = body->decode(res.code);
                double dist = 0.0;
                for (int v = 0; v < body->vertex_count(); ++v) {
                    dist += (recon.vertices[static_cast<size_t>(v)] -
                             item.registered.vertices[static_cast<size_t>(v)])
                                .norm();
                }
                baseline_err += dist / body->vertex_count();
                baseline_seconds += res.seconds;
            }
            metric("baseline.mean_vertex_dist", baseline_err / baseline_count);
            timing << "baseline.wall_time_per_mesh\t" << baseline_seconds / baseline_count
                   << "\n";
            const double per_mesh = rm.wall_time_per_1k / 1000.0;
            if (per_mesh > 0.0) {
                timing << "baseline.speed_ratio\t"
                       << (baseline_seconds / baseline_count) / per_mesh << "\n";
            }
        }
    }

    if (config.get_int("eval.mogen", 1) != 0) {
        const MogenModel model = MogenModel::load(mogen_bundle(config));
        const int count = config.get_int("eval.mogen_windows", 60);
        const auto sequences = mogen_sequences(config, model.pose_dim(), "mogen-eval", count);
        const auto windows = extract_minisequences(sequences, config.get_int("mogen.T", 4),
                                                   config.get_int("mogen.stride", 2));
        double interp_err = 0.0, linear_interp_err = 0.0;
        double extrap_err = 0.0, linear_extrap_err = 0.0;
        double autoencode = 0.0;
        for (const PoseSequence& w : windows) {
            const int T = w.frame_count() - 1;
            const PoseSequence mi = interpolate(model, w.codes.front(), w.codes.back(), T + 1);
            const PoseSequence li =
                linear_pose_interpolation(w.codes.front(), w.codes.back(), T + 1);
            interp_err += mean_rms_pose_error(mi, w, 1, T);
            linear_interp_err += mean_rms_pose_error(li, w, 1, T);

            const PoseSequence me = extrapolate(model, w.codes[0], w.codes[1], T + 1);
            PoseSequence le;
            for (int i = 0; i <= T; ++i) {
                le.codes.push_back(w.codes[0] + static_cast<double>(i) * (w.codes[1] - w.codes[0]));
            }
            extrap_err += mean_rms_pose_error(me, w, 2, T + 1);
            linear_extrap_err += mean_rms_pose_error(le, w, 2, T + 1);

            for (const auto& pose : w.codes) {
                const Eigen::VectorXd round_trip = model.project(model.lift(pose));
                autoencode += (round_trip - pose).squaredNorm() /
                              (pose.size() * static_cast<double>(w.frame_count()));
            }
        }
        const double n = static_cast<double>(windows.size());
        metric("mogen.interp_error", interp_err / n);
        metric("mogen.linear_interp_error", linear_interp_err / n);
        metric("mogen.extrap_error", extrap_err / n);
        metric("mogen.linear_extrap_error", linear_extrap_err / n);
        metric("mogen.autoencode_mse", autoencode / n);
    }
}

void cmd_dist(const RunConfig& config, std::ostream& log) {
    const fs::path out = out_dir(config);
    OutDirLock lock(out);
    const TriMesh a = load_obj(require(config, "dist.mesh_a"));
    const TriMesh b = load_obj(require(config, "dist.mesh_b"));
    const double diag = 0.5 * (bbox_diagonal(a) + bbox_diagonal(b));
    const VarifoldKernel kernel = make_kernel(config, diag);

    const double varifold = varifold_sq_dist(a, b, kernel);
    const double chamfer = chamfer_sq_dist(a, b);
    std::ofstream text(out / "dist.txt");
    text << "varifold_sq_dist\t" << fmt(varifold) << "\n";
    text << "chamfer_sq_dist\t" << fmt(chamfer) << "\n";
    log << "varifold_sq_dist\t" << fmt(varifold) << "\n";
    log << "chamfer_sq_dist\t" << fmt(chamfer) << "\n";
}

bool run_command(const std::string& name, const RunConfig& config, std::ostream& log) {
    if (name == "gen-data") cmd_gen_data(config, log);
    else if (name == "train-varishape") cmd_train_varishape(config, log);
    else if (name == "train-mogen") cmd_train_mogen(config, log);
    else if (name == "retrieve") cmd_retrieve(config, log);
    else if (name == "interp") cmd_interp(config, log);
    else if (name == "extrap") cmd_extrap(config, log);
    else if (name == "transfer") cmd_transfer(config, log);
    else if (name == "sample") cmd_sample(config, log);
    else if (name == "interp4d") cmd_interp4d(config, log);
    else if (name == "eval") cmd_eval(config, log);
    else if (name == "dist") cmd_dist(config, log);
    else return false;
    return true;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {
        "gen-data", "train-varishape", "train-mogen", "retrieve", "interp", "extrap",
        "transfer",  "sample",          "interp4d",   "eval",     "dist"};
    return names;
}

} // namespace vmo

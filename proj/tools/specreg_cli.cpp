// Command-line driver for the registration toolkit.
//
// Subcommands: register, subdivide, zoomout, evaluate, transfer-texture,
// validate. Exit codes: 0 success, 2 input error, 3 numerical failure.
#include <CLI11.hpp>

#include "specreg/eval.hpp"
#include "specreg/hra.hpp"
#include "specreg/mesh_io.hpp"

#include <filesystem>
#include <iostream>
#include <map>

using namespace specreg;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

TriMesh load_scaled(const std::string& path, double scale) {
    TriMesh m = load_mesh(path);
    if (scale != 1.0)
        for (Vec3& p : m.positions) p *= scale;
    return m;
}

std::vector<std::pair<int, int>> load_landmarks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open landmark file: " + path);
    std::vector<std::pair<int, int>> lm;
    int a, b;
    while (in >> a >> b) lm.emplace_back(a, b);
    if (lm.empty()) throw InputError("landmark file is empty: " + path);
    return lm;
}

// Pipeline parameters addressable from a flat key=value config file.
struct PipelineConfig {
    HraConfig hra;
    ZoomOutParams zoomout;
    std::string hra_mode = "none";  // none | global | local
    double scale = 1.0;

    std::map<std::string, double*> numeric_keys() {
        return {
            {"iterations", nullptr},  // handled as int below
            {"curvature_threshold", &hra.curvature_threshold},
            {"dilation_radius", &hra.dilation_radius},
            {"max_distance", &hra.max_distance},
            {"normal_cos_min", &hra.normal_cos_min},
            {"data_weight", &hra.data_weight},
            {"arap_weight", &hra.arap_weight},
            {"arap_rel_tol", &hra.arap_rel_tol},
            {"landmark_regularization", &zoomout.landmark_regularization},
            {"scale", &scale},
        };
    }
    std::map<std::string, int*> int_keys() {
        return {
            {"iterations", &hra.iterations},
            {"arap_max_iters", &hra.arap_max_iters},
            {"k_start_m", &zoomout.k_start_M},
            {"k_start_n", &zoomout.k_start_N},
            {"k_end", &zoomout.k_end},
            {"step", &zoomout.step},
        };
    }

    void apply(const std::string& key, const std::string& value) {
        if (key == "scheme") {
            hra.scheme = scheme_from_string(value);
            return;
        }
        if (key == "hra") {
            if (value != "none" && value != "global" && value != "local")
                throw InputError("invalid config value for hra: " + value);
            hra_mode = value;
            return;
        }
        auto ik = int_keys();
        if (auto it = ik.find(key); it != ik.end()) {
            *it->second = std::stoi(value);
            return;
        }
        auto nk = numeric_keys();
        if (auto it = nk.find(key); it != nk.end() && it->second) {
            *it->second = std::stod(value);
            return;
        }
        throw InputError("unknown config key: " + key);
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open config file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw InputError("config line " + std::to_string(lineno) +
                                 " is not key=value: " + line);
            auto trim = [](std::string s) {
                s.erase(0, s.find_first_not_of(" \t\r"));
                s.erase(s.find_last_not_of(" \t\r") + 1);
                return s;
            };
            apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }

    // The fully resolved parameter set, recorded next to the outputs.
    void dump(const std::string& path) {
        std::ofstream out(path);
        if (!out) throw InputError("cannot write resolved config: " + path);
        out << std::setprecision(12);
        out << "hra=" << hra_mode << '\n';
        out << "scheme=" << to_string(hra.scheme) << '\n';
        for (auto& [k, p] : int_keys()) out << k << '=' << *p << '\n';
        for (auto& [k, p] : numeric_keys())
            if (p) out << k << '=' << *p << '\n';
    }
};

int cmd_register(const std::string& templ_path, const std::string& target_path,
                 const std::string& landmarks_path, const std::string& out_dir,
                 PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    TriMesh templ = load_scaled(templ_path, cfg.scale);
    TriMesh target = load_scaled(target_path, cfg.scale);
    auto landmarks = load_landmarks(landmarks_path);
    for (auto [tv, gv] : landmarks) {
        if (tv < 0 || tv >= templ.vertex_count() || gv < 0 || gv >= target.vertex_count())
            throw InputError("landmark out of range: " + std::to_string(tv) + " " +
                             std::to_string(gv));
    }
    fs::create_directories(out_dir);
    cfg.dump((fs::path(out_dir) / "resolved_config.txt").string());

    RegistrationResult res = zosr_register(templ, target, landmarks, cfg.hra, cfg.zoomout);
    if (cfg.hra_mode == "global") {
        RegistrationResult hra = hra_global(res.registered, target, cfg.hra);
        hra.log.insert(hra.log.begin(), res.log.begin(), res.log.end());
        res = std::move(hra);
    } else if (cfg.hra_mode == "local") {
        RegistrationResult hra = hra_local(res.registered, target, res.pointmap, cfg.hra);
        hra.log.insert(hra.log.begin(), res.log.begin(), res.log.end());
        res = std::move(hra);
    }

    save_mesh(res.registered, (fs::path(out_dir) / "registered.ply").string(), MeshFormat::Ply,
              &res.distance);
    save_pointmap(res.pointmap, (fs::path(out_dir) / "pointmap.txt").string());
    save_stage_log(res.log, (fs::path(out_dir) / "stages.csv").string());
    std::cout << "registered " << res.registered.vertex_count() << " vertices, mean distance "
              << res.log.back().mean_dist_m << " m\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral non-rigid registration and subdivision-based refinement"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Bound internal parallelism")->capture_default_str();

    PipelineConfig cfg;
    std::string config_path, templ_path, target_path, landmarks_path, out_dir;

    double flag_scale = 1.0;
    std::string flag_hra_mode;
    int flag_iterations = 0, flag_k_end = 0;
    auto* reg = app.add_subcommand("register", "Landmark-seeded spectral registration");
    reg->add_option("--template", templ_path, "Template mesh (OBJ/PLY)")->required();
    reg->add_option("--target", target_path, "Target mesh (OBJ/PLY)")->required();
    reg->add_option("--landmarks", landmarks_path,
                    "Text file of 'template_vertex target_vertex' pairs")
        ->required();
    reg->add_option("--out-dir", out_dir, "Output directory")->required();
    reg->add_option("--config", config_path, "key=value parameter file");
    reg->add_option("--scale", flag_scale, "Scale applied to both meshes on load");
    reg->add_option("--hra", flag_hra_mode, "Refinement after registration: none|global|local");
    reg->add_option("--iterations", flag_iterations, "Refinement iterations");
    reg->add_option("--k-end", flag_k_end, "Final spectral truncation");

    std::string in_path, out_path, scheme_name = "loop", selection_path, record_path;
    int iters = 1;
    auto* sub = app.add_subcommand("subdivide", "Subdivide a mesh");
    sub->add_option("--input", in_path, "Input mesh")->required();
    sub->add_option("--output", out_path, "Output mesh")->required();
    sub->add_option("--scheme", scheme_name, "loop | upsample | bcs")->capture_default_str();
    sub->add_option("--iters", iters, "Iterations")->capture_default_str();
    sub->add_option("--selection", selection_path,
                    "Face-id file restricting a single loop iteration to a region");
    sub->add_option("--record", record_path, "Write the provenance record here");

    std::string mesh_m_path, mesh_n_path, fmap_path, out_map, out_fmap;
    int k_start_m = 30, k_start_n = 50, k_end = 100, step = 1;
    auto* zo = app.add_subcommand("zoomout", "Refine a functional map and export a pointmap");
    zo->add_option("--mesh-m", mesh_m_path, "Map codomain mesh")->required();
    zo->add_option("--mesh-n", mesh_n_path, "Map domain mesh")->required();
    zo->add_option("--init", fmap_path, "Initial map coefficients (default: identity)");
    zo->add_option("--k-start-m", k_start_m, "")->capture_default_str();
    zo->add_option("--k-start-n", k_start_n, "")->capture_default_str();
    zo->add_option("--k-end", k_end, "")->capture_default_str();
    zo->add_option("--step", step, "")->capture_default_str();
    zo->add_option("--out-map", out_map, "Output pointmap file")->required();
    zo->add_option("--out-fmap", out_fmap, "Output coefficient matrix");

    std::string pred_path, truth_path, curve_path;
    std::vector<double> thresholds;
    auto* ev = app.add_subcommand("evaluate", "Geodesic-error curve of a map against truth");
    ev->add_option("--target", target_path, "Mesh both maps land on")->required();
    ev->add_option("--pred", pred_path, "Predicted pointmap file")->required();
    ev->add_option("--truth", truth_path, "Ground-truth pointmap file")->required();
    ev->add_option("--output", curve_path, "CSV output")->required();
    ev->add_option("--thresholds", thresholds, "Ascending thresholds (default 0..0.25)");

    std::string source_path, map_path;
    auto* tt = app.add_subcommand("transfer-texture", "Pull source UVs through a pointmap");
    tt->add_option("--source", source_path, "Mesh with UVs")->required();
    tt->add_option("--target", target_path, "Mesh receiving UVs")->required();
    tt->add_option("--map", map_path, "Pointmap from target vertices onto the source")
        ->required();
    tt->add_option("--output", out_path, "Output mesh (OBJ keeps UVs)")->required();

    auto* va = app.add_subcommand("validate", "Check a mesh and print its statistics");
    va->add_option("mesh", in_path, "Input mesh")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    Eigen::setNbThreads(threads);
    try {
        if (*reg) {
            if (!config_path.empty()) cfg.load_file(config_path);
            // command-line flags override file values
            if (reg->count("--scale")) cfg.scale = flag_scale;
            if (reg->count("--hra")) cfg.hra_mode = flag_hra_mode;
            if (reg->count("--iterations")) cfg.hra.iterations = flag_iterations;
            if (reg->count("--k-end")) cfg.zoomout.k_end = flag_k_end;
            if (cfg.hra_mode != "none" && cfg.hra_mode != "global" && cfg.hra_mode != "local")
                throw InputError("invalid --hra mode: " + cfg.hra_mode);
            return cmd_register(templ_path, target_path, landmarks_path, out_dir, cfg);
        }
        if (*sub) {
            TriMesh m = load_mesh(in_path);
            SubdivisionRecord last;
            if (!selection_path.empty()) {
                if (iters != 1)
                    throw InputError("--selection supports a single loop iteration");
                FaceSelection sel =
                    repair_selection(load_selection(m, selection_path));
                auto [next, rec] = local_loop_subdivide(m, sel);
                m = std::move(next);
                last = std::move(rec);
            } else {
                SubdivisionScheme scheme = scheme_from_string(scheme_name);
                if (scheme == SubdivisionScheme::Bcs && iters > 2)
                    throw InputError("bcs supports at most 2 iterations");
                for (int i = 0; i < iters; ++i) {
                    auto [next, rec] = subdivide(m, scheme);
                    m = std::move(next);
                    last = std::move(rec);
                }
            }
            save_mesh(m, out_path);
            if (!record_path.empty()) save_record(last, record_path);
            std::cout << m.vertex_count() << " vertices, " << m.face_count() << " faces\n";
            return 0;
        }
        if (*zo) {
            TriMesh M = load_mesh(mesh_m_path);
            TriMesh N = load_mesh(mesh_n_path);
            int k = std::max({k_end, k_start_m, k_start_n});
            Eigenbasis basis_M = eigenbasis(build_laplacian(M), std::min(k, M.vertex_count()));
            Eigenbasis basis_N = eigenbasis(build_laplacian(N), std::min(k, N.vertex_count()));
            FunctionalMap C0;
            C0.basis_M = &basis_M;
            C0.basis_N = &basis_N;
            if (fmap_path.empty())
                C0.C = Eigen::MatrixXd::Identity(k_start_n, k_start_m);
            else
                C0.C = load_fmap_matrix(fmap_path);
            ZoomOutResult z = zoomout(C0, std::min(k_end, basis_M.k),
                                      std::min(k_end, basis_N.k), step);
            save_pointmap(z.pointmap, out_map);
            if (!out_fmap.empty()) save_fmap(z.fmap, out_fmap);
            return 0;
        }
        if (*ev) {
            TriMesh target = load_mesh(target_path);
            PointMap pred = load_pointmap(pred_path);
            PointMap truth = load_pointmap(truth_path);
            pred.source = truth.source = &target;
            ScalarField err = geodesic_error(pred, truth);
            if (thresholds.empty())
                for (int i = 0; i <= 50; ++i) thresholds.push_back(0.005 * i);
            save_error_curve(error_curve(err, thresholds), curve_path);
            std::cout << "mean error " << err.mean() << ", max " << err.maxCoeff() << '\n';
            return 0;
        }
        if (*tt) {
            TriMesh source = load_mesh(source_path);
            TriMesh target = load_mesh(target_path);
            PointMap pi = load_pointmap(map_path);
            pi.source = &source;
            pi.target = &target;
            save_mesh(transfer_texture(source, target, pi), out_path);
            return 0;
        }
        if (*va) {
            TriMesh m = load_mesh(in_path);
            std::cout << in_path << ": " << m.vertex_count() << " vertices, "
                      << undirected_edge_count(m) << " edges, " << m.face_count()
                      << " faces, chi=" << euler_characteristic(m)
                      << ", area=" << m.total_area() << '\n';
            return 0;
        }
    } catch (const ArapError& e) {
        std::cerr << "error: numeric: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const SpectralError& e) {
        std::cerr << "error: numeric: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: input: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}

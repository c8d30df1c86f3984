// Writes the small mesh pair used by the CLI integration test into argv[1].
#include "fixtures.hpp"
#include "specreg/mesh_io.hpp"

#include <filesystem>

using namespace specreg;

int main(int argc, char** argv) {
    if (argc != 2) return 1;
    std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);

    TriMesh t = fixtures::bumpy_sphere(2, 0.1, Vec3(0.4, 1, 0.2));
    save_mesh(t, (dir / "template.obj").string());
    TriMesh g = fixtures::rigid_transform(t, fixtures::rotation_xyz(0.3, -0.5, 0.8),
                                          Vec3(0.5, 1, -0.2));
    save_mesh(g, (dir / "target.ply").string());

    TriMesh uv = t;
    uv.uv.resize(uv.vertex_count());
    for (int i = 0; i < uv.vertex_count(); ++i)
        uv.uv[i] = Eigen::Vector2d(std::fmod(i * 0.13, 1.0), std::fmod(i * 0.31, 1.0));
    save_mesh(uv, (dir / "template_uv.obj").string());

    std::ofstream lm(dir / "landmarks.txt");
    for (int v : {0, 40, 81, 120, 155}) lm << v << ' ' << v << '\n';

    std::ofstream cfg(dir / "config.txt");
    cfg << "k_start_m=10\nk_start_n=10\nk_end=40\n";
    return 0;
}

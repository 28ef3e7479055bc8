// Renders the forceps silhouette at a fixed pose, then prints the mask,
// its edge set, and the clamped edge-weight field as ASCII art.

#include <endocal/endocal.hpp>

#include <cstdio>

using namespace endocal;

int main() {
    CameraIntrinsics cam = default_endoscope_intrinsics(72, 48);
    cam.fx = 60.0;
    cam.fy = 60.0;
    cam.cx = 36.0;
    cam.cy = 24.0;
    cam.view_circle = {36.0, 24.0, 40.0};

    const TriangleMesh mesh = make_forceps_mesh();
    const RigidTransform pose =
        from_euler(Vec3{0.0, 2.0, 28.0}, Vec3{60.0, 15.0, 40.0});
    const BinaryMask mask = rasterize_silhouette(pose_mesh(mesh, pose, 25.0), cam);
    const BinaryMask edges = extract_edges(mask);
    const DistanceField dist = distance_transform(edges);
    const WeightField weights = weight_field(dist, 6.0);

    std::printf("silhouette (%llu px):\n", static_cast<unsigned long long>(mask.count()));
    for (int v = 0; v < mask.height; ++v) {
        for (int u = 0; u < mask.width; ++u)
            std::putchar(mask.get(u, v) ? (edges.get(u, v) ? '#' : '+') : '.');
        std::putchar('\n');
    }

    std::printf("\nedge weight p(u,v), scaled 0..9:\n");
    const double p_max = 36.0;  // (d_max - 0)^2
    for (int v = 0; v < weights.height; ++v) {
        for (int u = 0; u < weights.width; ++u) {
            const double p = weights.p[static_cast<std::size_t>(v) * weights.width + u];
            std::putchar(p <= 0.0 ? '.' : static_cast<char>('0' + std::min(9, static_cast<int>(p / p_max * 10.0))));
        }
        std::putchar('\n');
    }
    return 0;
}

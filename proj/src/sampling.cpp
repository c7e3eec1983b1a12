#include "nehari/sampling.hpp"

#include <cmath>
#include <numbers>

#include "nehari/numerics.hpp"

namespace nehari {

namespace {
constexpr int kModesPerAxis = 6;
}

DirectionSampler::DirectionSampler(const Mesh& mesh, std::uint64_t seed,
                                   std::string_view tag)
    : mesh_(&mesh) {
    std::uint64_t state = fnv1a64(tag.data(), tag.size());
    state = fnv1a64_mix(state, &seed, sizeof(seed));
    rng_.seed(state);
}

double DirectionSampler::uniform() {
    // 53 explicit mantissa bits; bitwise reproducible for a fixed engine
    // sequence regardless of the standard library's distribution internals.
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double DirectionSampler::normal() {
    // Box-Muller, one value per call (the partner draw is discarded so the
    // stream position stays a simple function of the call count).
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

ScalarField DirectionSampler::fundamental() const {
    const Mesh& mesh = *mesh_;
    return ScalarField::from_function(mesh, [&mesh](double x, double y) {
        double v = std::sin(std::numbers::pi * x / mesh.extent(0));
        if (mesh.dim() == 2) {
            v *= std::sin(std::numbers::pi * y / mesh.extent(1));
        }
        return v;
    });
}

ScalarField DirectionSampler::next() {
    const Mesh& mesh = *mesh_;
    const int dim = mesh.dim();
    // Draw coefficients first so the stream consumption per direction is
    // fixed, independent of mesh size.
    double coeff[kModesPerAxis][kModesPerAxis] = {};
    const int jmax = dim == 2 ? kModesPerAxis : 1;
    for (int i = 0; i < kModesPerAxis; ++i) {
        for (int j = 0; j < jmax; ++j) {
            const double decay =
                1.0 / ((i + 1.0) * (i + 1.0) + (dim == 2 ? (j + 1.0) * (j + 1.0) : 0.0));
            coeff[i][j] = normal() * decay;
        }
    }
    ScalarField out(mesh);
    const double lx = mesh.extent(0);
    const double ly = dim == 2 ? mesh.extent(1) : 1.0;
    for (int n = 0; n < mesh.node_count(); ++n) {
        if (mesh.is_boundary_node(n)) continue;
        const auto xy = mesh.node_coord(n);
        double v = 0.0;
        for (int i = 0; i < kModesPerAxis; ++i) {
            const double sx = std::sin((i + 1) * std::numbers::pi * xy[0] / lx);
            for (int j = 0; j < jmax; ++j) {
                double mode = sx;
                if (dim == 2) {
                    mode *= std::sin((j + 1) * std::numbers::pi * xy[1] / ly);
                }
                v += coeff[i][j] * mode;
            }
        }
        out[n] = v;
    }
    const double amp = out.max_abs();
    if (amp > 0.0) {
        out *= 1.0 / amp;
    }
    return out;
}

} // namespace nehari

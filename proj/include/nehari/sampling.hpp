#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "nehari/field.hpp"

namespace nehari {

/// Deterministic stream of smooth zero-trace directions: superpositions of
/// the low sine modes of the box with randomly drawn decaying coefficients.
/// Each (seed, tag) pair is an independent substream, so reordering one
/// consumer never perturbs another.
class DirectionSampler {
public:
    DirectionSampler(const Mesh& mesh, std::uint64_t seed,
                     std::string_view tag);

    /// Fresh random direction, max-normalized to O(1) amplitude.
    [[nodiscard]] ScalarField next();

    /// The lowest sine mode (deterministic, no stream consumption).
    [[nodiscard]] ScalarField fundamental() const;

    /// Uniform double in [0, 1) from the same substream.
    [[nodiscard]] double uniform();

private:
    const Mesh* mesh_;
    std::mt19937_64 rng_;
    [[nodiscard]] double normal();
};

} // namespace nehari

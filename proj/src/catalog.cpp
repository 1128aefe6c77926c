#include "toruslab/catalog.hpp"

#include "toruslab/errors.hpp"
#include "toruslab/random.hpp"

#include <numbers>

namespace toruslab {

namespace {

IntMatrix mat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    IntMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

ShearFactor shear(int axis, std::vector<int> freq, double amplitude, double phase = 0.0) {
    return ShearFactor{axis, std::move(freq), amplitude, phase};
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"identity", "shear", "cat", "inverse-cat", "cat-cat",
            "perturbed-cat-0.05", "perturbed-cat-0.1", "standard-shear-pair"};
}

TorusSystem catalog_system(const std::string& name) {
    if (name == "identity") return TorusSystem(mat2(1, 0, 0, 1), {}, name);
    if (name == "shear") return TorusSystem(mat2(1, 1, 0, 1), {}, name);
    if (name == "cat") return TorusSystem(mat2(2, 1, 1, 1), {}, name);
    if (name == "inverse-cat") return TorusSystem(mat2(1, -1, -1, 2), {}, name);
    if (name == "cat-cat") {
        IntMatrix m = IntMatrix::Zero(4, 4);
        m.block(0, 0, 2, 2) = mat2(2, 1, 1, 1);
        m.block(2, 2, 2, 2) = mat2(2, 1, 1, 1);
        return TorusSystem(m, {}, name);
    }
    if (name == "perturbed-cat-0.05") return TorusSystem(mat2(2, 1, 1, 1), {shear(1, {1, 0}, 0.05)}, name);
    if (name == "perturbed-cat-0.1") return TorusSystem(mat2(2, 1, 1, 1), {shear(1, {1, 0}, 0.1)}, name);
    if (name == "standard-shear-pair") {
        return TorusSystem(mat2(1, 0, 0, 1), {shear(0, {0, 1}, 0.02), shear(1, {1, 0}, 0.02)}, name);
    }
    throw InputError("unknown catalog system '" + name + "'");
}

std::vector<TorusSystem> catalog_systems() {
    std::vector<TorusSystem> out;
    for (const auto& n : catalog_names()) out.push_back(catalog_system(n));
    return out;
}

TorusSystem random_conservative_system(std::uint64_t seed) {
    SplitRng rng(seed, 0x5eed);
    // Products of elementary matrices and sign flips stay in GL(2, Z); retry
    // until the entries are small.
    IntMatrix m;
    while (true) {
        m = IntMatrix::Identity(2, 2);
        const int factors = 1 + static_cast<int>(rng.below(4));
        for (int f = 0; f < factors; ++f) {
            IntMatrix e = IntMatrix::Identity(2, 2);
            const auto coef = static_cast<std::int64_t>(rng.below(3)) - 1;
            switch (rng.below(3)) {
                case 0: e(0, 1) = coef == 0 ? 1 : coef; break;
                case 1: e(1, 0) = coef == 0 ? 1 : coef; break;
                default: e << 0, 1, 1, 0; break;
            }
            m = e * m;
        }
        if (m.cwiseAbs().maxCoeff() <= 3) break;
    }
    std::vector<ShearFactor> shears;
    const int count = 1 + static_cast<int>(rng.below(2));
    for (int s = 0; s < count; ++s) {
        const int axis = static_cast<int>(rng.below(2));
        std::vector<int> freq(2, 0);
        const int mag = 1 + static_cast<int>(rng.below(2));
        freq[static_cast<std::size_t>(1 - axis)] = rng.below(2) == 0 ? mag : -mag;
        const double amplitude = 0.1 * (0.1 + 0.9 * rng.uniform());
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        shears.push_back(ShearFactor{axis, freq, amplitude, phase});
    }
    return TorusSystem(m, shears, "random-" + std::to_string(seed));
}

}  // namespace toruslab

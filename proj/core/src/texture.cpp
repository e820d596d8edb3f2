// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "specsep/error.hpp"
#include "specsep/random.hpp"

namespace specsep {

void
ProceduralAlbedo::validate() const
{
    for (double b : base)
        require(b > 0.0 && b <= 1.0, "albedo base must lie in (0, 1]");
    require(contrast >= 0.0 && contrast < 1.0, "contrast must lie in [0, 1)");
    require(min_frequency > 0.0 && max_frequency >= min_frequency,
            "invalid frequency range");
    require(waves >= 0, "wave count must be non-negative");
    require(grain >= 0.0 && grain < 1.0, "grain must lie in [0, 1)");
    require(floor > 0.0 && floor < 1.0, "floor must lie in (0, 1)");
}

void
to_json(nlohmann::json& j, const ProceduralAlbedo& p)
{
    j = {{"base", p.base},
         {"contrast", p.contrast},
         {"min_frequency", p.min_frequency},
         {"max_frequency", p.max_frequency},
         {"waves", p.waves},
         {"grain", p.grain},
         {"floor", p.floor},
         {"seed", p.seed}};
}

void
from_json(const nlohmann::json& j, ProceduralAlbedo& p)
{
    ProceduralAlbedo d;
    for (const auto& [key, value] : j.items()) {
        if (key == "base")
            d.base = value.get<Rgb>();
        else if (key == "contrast")
            d.contrast = value.get<double>();
        else if (key == "min_frequency")
            d.min_frequency = value.get<double>();
        else if (key == "max_frequency")
            d.max_frequency = value.get<double>();
        else if (key == "waves")
            d.waves = value.get<int>();
        else if (key == "grain")
            d.grain = value.get<double>();
        else if (key == "floor")
            d.floor = value.get<double>();
        else if (key == "seed")
            d.seed = value.get<std::uint64_t>();
        else
            fail(ErrorKind::InvalidArgument,
                 "unknown procedural texture key '" + key + "'");
    }
    p = d;
}

Raster
make_procedural_albedo(int resolution, const ProceduralAlbedo& params)
{
    require(resolution > 0, "texture resolution must be positive");
    params.validate();

    struct Wave {
        double fx, fy, phase, weight;
        Rgb tint;
    };
    Rng rng(params.seed);
    std::vector<Wave> waves(std::size_t(params.waves));
    double total = 0.0;
    for (Wave& w : waves) {
        const double f = rng.uniform(params.min_frequency, params.max_frequency);
        const double angle = rng.uniform(0.0, std::numbers::pi);
        w.fx = f * std::cos(angle);
        w.fy = f * std::sin(angle);
        w.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        w.weight = rng.uniform(0.5, 1.0);
        for (double& t : w.tint)
            t = rng.uniform(0.8, 1.2);
        total += w.weight;
    }

    Raster out(resolution, resolution, 3);
    Rng grain(Rng::mix(params.seed, 1));
    for (int y = 0; y < resolution; ++y) {
        const double v = (y + 0.5) / resolution;
        for (int x = 0; x < resolution; ++x) {
            const double u = (x + 0.5) / resolution;
            Rgb pattern{};
            for (const Wave& w : waves) {
                const double s = std::sin(2.0 * std::numbers::pi
                                              * (w.fx * u + w.fy * v)
                                          + w.phase);
                for (int c = 0; c < 3; ++c)
                    pattern[c] += w.weight * w.tint[c] * s;
            }
            const double g = params.grain * grain.uniform(-1.0, 1.0);
            for (int c = 0; c < 3; ++c) {
                const double m = total > 0.0 ? pattern[c] / (1.2 * total) : 0.0;
                const double a = params.base[c] * (1.0 + params.contrast * m)
                                 * (1.0 + g);
                out.at(x, y, c) = std::clamp(a, params.floor, 1.0);
            }
        }
    }
    return out;
}

}  // namespace specsep

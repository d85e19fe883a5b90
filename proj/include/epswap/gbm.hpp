#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "epswap/black_scholes.hpp"
#include "epswap/random.hpp"

namespace epswap {

// Deterministic crash injection: after the diffusion move of 1-based step
// `step`, every path is multiplied by `factor`.
struct JumpEvent {
    int step = 0;
    double factor = 1.0;
};

// Simulated price grid, (n_steps + 1) rows by n_paths columns; row 0 is s0.
struct PathGrid {
    int n_steps = 0;
    int n_paths = 0;
    std::vector<double> values;  // row-major by step

    double at(int step, int path) const {
        return values[static_cast<std::size_t>(step) * static_cast<std::size_t>(n_paths) + static_cast<std::size_t>(path)];
    }
};

// Risk-neutral GBM paths with exact lognormal stepping over p.maturity_years
// split into `steps` equal increments (no Euler discretization error).
// Deterministic for a given seed at any level of parallelism because path i
// owns the stream derived from (seed, i).
inline PathGrid gbm_paths(double s0, const BsParams& p, int steps, int n_paths, std::uint64_t seed,
                          std::span<const JumpEvent> jumps = {}) {
    validate(p);
    if (!(s0 > 0.0)) throw DomainError("initial price must be positive");
    if (steps < 1 || n_paths < 1) throw ValidationError("step and path counts must be at least 1");
    std::map<int, double> jump_at;
    for (const JumpEvent& j : jumps) {
        if (!(j.factor > 0.0)) throw ValidationError("jump factor must be positive");
        if (j.step < 1 || j.step > steps) throw ValidationError("jump step outside simulation horizon");
        auto [it, inserted] = jump_at.try_emplace(j.step, 1.0);
        it->second *= j.factor;
    }
    const double dt = p.maturity_years / steps;
    const double drift = (p.rate - p.dividend_yield - 0.5 * p.volatility * p.volatility) * dt;
    const double diffusion = p.volatility * std::sqrt(dt);

    PathGrid grid;
    grid.n_steps = steps;
    grid.n_paths = n_paths;
    grid.values.assign(static_cast<std::size_t>(steps + 1) * n_paths, 0.0);
    for (int path = 0; path < n_paths; ++path) {
        NormalStream noise(seed, static_cast<std::uint64_t>(path));
        double s = s0;
        grid.values[static_cast<std::size_t>(path)] = s;
        for (int step = 1; step <= steps; ++step) {
            s *= std::exp(drift + diffusion * noise.next());
            if (auto it = jump_at.find(step); it != jump_at.end()) s *= it->second;
            grid.values[static_cast<std::size_t>(step) * n_paths + path] = s;
        }
    }
    return grid;
}

}  // namespace epswap

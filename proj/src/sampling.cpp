#include "fsmpc/sampling.hpp"

#include <cmath>

namespace fsmpc {

State5 random_state(std::mt19937_64& rng, double r_min, double r_max) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    State5 dir{gauss(rng), gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    double n = dir.norm();
    while (n == 0.0) {  // astronomically unlikely, but keeps the direction well-defined
        dir = {gauss(rng), gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
        n = dir.norm();
    }
    std::uniform_real_distribution<double> uni(std::log(r_min), std::log(r_max));
    const double radius = std::exp(uni(rng));
    return (radius / n) * dir;
}

}  // namespace fsmpc

#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <variant>

#include "perslab/errors.hpp"

namespace perslab {

// Validated (alpha, hurst) in Omega = {alpha + H > 1, 0 < H < 1}.
// kappa is derived on every call, so the pair cannot drift out of sync.
class ProcessParams {
public:
    double alpha() const { return alpha_; }
    double hurst() const { return hurst_; }
    double kappa() const { return alpha_ + hurst_ - 1.0; }
    double hurst_bar() const { return 1.0 - hurst_; }

    friend ProcessParams make_params(double alpha, double hurst);

    bool operator==(const ProcessParams& o) const {
        return alpha_ == o.alpha_ && hurst_ == o.hurst_;
    }

private:
    ProcessParams(double a, double h) : alpha_(a), hurst_(h) {}
    double alpha_;
    double hurst_;
};

inline ProcessParams make_params(double alpha, double hurst) {
    if (!std::isfinite(alpha) || !std::isfinite(hurst))
        throw DomainError("make_params: non-finite input");
    if (!(alpha > 0.0))
        throw DomainError("make_params: alpha must be positive");
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("make_params: hurst must lie in (0, 1)");
    if (!(alpha + hurst - 1.0 > 0.0))
        throw DomainError("make_params: alpha + hurst must exceed 1");
    return ProcessParams(alpha, hurst);
}

// (alpha, H) -> (alpha + 2H - 1, 1 - H). Same spectrum, same kappa.
inline ProcessParams symmetry_image(const ProcessParams& p) {
    return make_params(p.alpha() + 2.0 * p.hurst() - 1.0, 1.0 - p.hurst());
}

inline double c_of_h(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("c_of_h: hurst must lie in (0, 1)");
    return std::fmin(hurst, 1.0 - hurst);
}

struct FractionalIntegratedNoise {
    ProcessParams params;
};

// Dual of the Laplace transform of FBM, covariance cosh((2H-1)t/2)/cosh(t/2).
struct LaplaceFbmDual {
    double hurst;
};

// Covariance exp(-|t|), persistence exponent 1.
struct OrnsteinUhlenbeck {};

using ProcessFamily = std::variant<FractionalIntegratedNoise, LaplaceFbmDual, OrnsteinUhlenbeck>;

inline ProcessFamily make_laplace_dual(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("LaplaceFbmDual: hurst must lie in (0, 1)");
    return LaplaceFbmDual{hurst};
}

inline std::string family_tag(const ProcessFamily& f) {
    std::ostringstream os;
    os.precision(17);
    if (auto* n = std::get_if<FractionalIntegratedNoise>(&f))
        os << "fin(alpha=" << n->params.alpha() << ",hurst=" << n->params.hurst() << ")";
    else if (auto* l = std::get_if<LaplaceFbmDual>(&f))
        os << "laplace_dual(hurst=" << l->hurst << ")";
    else
        os << "ou";
    return os.str();
}

// Hoelder index of the dual's paths: drives the grid-bias rate of the
// discrete-maximum survival estimator. Infinity means smooth paths.
inline double path_roughness(const ProcessFamily& f) {
    if (auto* n = std::get_if<FractionalIntegratedNoise>(&f))
        return n->params.kappa() < 1.0 ? n->params.kappa() : INFINITY;
    if (std::holds_alternative<OrnsteinUhlenbeck>(f))
        return 0.5;
    return INFINITY;
}

} // namespace perslab

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "perslab/covariance.hpp"
#include "perslab/fft.hpp"
#include "perslab/parallel.hpp"
#include "perslab/rng.hpp"

namespace perslab {

enum class GridKind { Uniform, Exponential };

// Uniform grids: points = start + i*step. Exponential grids: points = exp(u0 + i*step).
// A Lamperti output lives on a uniform grid starting at 0 whose `origin` keeps the
// u value of its first point.
struct TimeGrid {
    std::vector<double> points;
    GridKind kind = GridKind::Uniform;
    double step = 0.0;
    double origin = 0.0;

    std::size_t size() const { return points.size(); }

    static TimeGrid uniform(double step, std::size_t n, double start = 0.0) {
        if (!(step > 0.0) || n < 1 || !(start >= 0.0))
            throw DomainError("TimeGrid::uniform: need step > 0, n >= 1, start >= 0");
        TimeGrid g;
        g.kind = GridKind::Uniform;
        g.step = step;
        g.origin = start;
        g.points.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.points[i] = start + step * static_cast<double>(i);
        return g;
    }

    static TimeGrid exponential(double u0, double u_step, std::size_t n) {
        if (!(u_step > 0.0) || n < 1 || !std::isfinite(u0))
            throw DomainError("TimeGrid::exponential: need u_step > 0 and n >= 1");
        TimeGrid g;
        g.kind = GridKind::Exponential;
        g.step = u_step;
        g.origin = u0;
        g.points.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.points[i] = std::exp(u0 + u_step * static_cast<double>(i));
        return g;
    }

    // Default exponential grid over u in [u0, ln T].
    static TimeGrid exponential_to(double horizon, double u0 = -3.0, double u_step = 0.05) {
        double u1 = std::log(horizon);
        if (!(u1 > u0))
            throw DomainError("TimeGrid::exponential_to: horizon must exceed exp(u0)");
        auto n = static_cast<std::size_t>(std::floor((u1 - u0) / u_step + 1e-9)) + 1;
        return exponential(u0, u_step, n);
    }

    double u(std::size_t i) const { return origin + step * static_cast<double>(i); }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << (kind == GridKind::Uniform ? "uniform" : "exponential") << "(origin=" << origin << ",step=" << step
           << ",n=" << points.size() << ")";
        return os.str();
    }
};

struct PathEnsemble {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::vector<double> data; // row-major, n_paths x grid.size()
    std::uint64_t seed = 0;
    std::string generator_tag;

    std::size_t n_points() const { return grid.size(); }
    std::span<const double> path(std::size_t i) const { return {data.data() + i * n_points(), n_points()}; }
    std::span<double> path(std::size_t i) { return {data.data() + i * n_points(), n_points()}; }
};

// A generator of exact-in-law paths. draw(seed, d, out) writes paths_per_draw()
// consecutive paths, those with indices d*ppd .. d*ppd + ppd - 1.
class PathSource {
public:
    virtual ~PathSource() = default;
    virtual const TimeGrid& grid() const = 0;
    virtual std::size_t paths_per_draw() const { return 1; }
    virtual void draw(std::uint64_t seed, std::size_t draw_index, double* out) const = 0;
    virtual std::string tag() const = 0;
};

// Streams n_paths paths in fixed blocks; consume(first_path, count, data) may run
// concurrently for different blocks. Block boundaries do not depend on workers.
template <class Consumer>
void stream_paths(const PathSource& src, std::size_t n_paths, std::uint64_t seed, unsigned workers,
                  Consumer&& consume, std::size_t block_paths = 256) {
    const std::size_t ppd = src.paths_per_draw();
    block_paths = std::max(ppd, block_paths - block_paths % ppd);
    const std::size_t n = src.grid().size();
    const std::size_t n_blocks = (n_paths + block_paths - 1) / block_paths;
    parallel_blocks(n_blocks, workers, [&](std::size_t b) {
        std::size_t first = b * block_paths;
        std::size_t count = std::min(block_paths, n_paths - first);
        std::size_t draws = (count + ppd - 1) / ppd;
        std::vector<double> buf(draws * ppd * n);
        for (std::size_t d = 0; d < draws; ++d)
            src.draw(seed, first / ppd + d, buf.data() + d * ppd * n);
        consume(first, count, static_cast<const double*>(buf.data()));
    });
}

inline PathEnsemble collect(const PathSource& src, std::size_t n_paths, std::uint64_t seed, unsigned workers = 1) {
    if (n_paths < 1)
        throw DomainError("collect: n_paths must be at least 1");
    PathEnsemble e;
    e.grid = src.grid();
    e.n_paths = n_paths;
    e.seed = seed;
    e.generator_tag = src.tag();
    const std::size_t n = e.grid.size();
    e.data.assign(n_paths * n, 0.0);
    stream_paths(src, n_paths, seed, workers, [&](std::size_t first, std::size_t count, const double* d) {
        std::memcpy(e.data.data() + first * n, d, sizeof(double) * count * n);
    });
    return e;
}

inline double fbm_covariance(double hurst, double s, double t) {
    double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::fabs(s - t), h2));
}

// Cholesky factor of an arbitrary covariance matrix with the 1e-12 jitter rule.
inline Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success)
        return llt.matrixL();
    double jitter = 1e-12 * cov.diagonal().maxCoeff();
    Eigen::MatrixXd c = cov;
    c.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> retry(c);
    if (retry.info() != Eigen::Success)
        throw SingularityError("cholesky: covariance matrix is not positive definite within jitter 1e-12");
    return retry.matrixL();
}

// Exact Gaussian paths from a covariance function by Cholesky factorization.
// Grid points at t = 0 are pinned to 0 (all process families start there).
class CholeskySource : public PathSource {
public:
    template <class Cov>
    CholeskySource(TimeGrid grid, Cov&& cov, std::string tag) : grid_(std::move(grid)), tag_(std::move(tag)) {
        skip_ = (grid_.points[0] == 0.0) ? 1 : 0;
        const std::size_t m = grid_.size() - skip_;
        Eigen::MatrixXd c(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                c(i, j) = c(j, i) = cov(grid_.points[i + skip_], grid_.points[j + skip_]);
        factor_ = cholesky_factor(c);
    }
    const TimeGrid& grid() const override { return grid_; }
    void draw(std::uint64_t seed, std::size_t d, double* out) const override {
        NormalStream z(seed, d);
        const auto m = static_cast<Eigen::Index>(factor_.rows());
        Eigen::VectorXd v(m);
        for (Eigen::Index i = 0; i < m; ++i)
            v[i] = z();
        Eigen::VectorXd x = factor_.triangularView<Eigen::Lower>() * v;
        if (skip_)
            out[0] = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            out[i + skip_] = x[i];
    }
    std::string tag() const override { return tag_; }

private:
    TimeGrid grid_;
    std::string tag_;
    std::size_t skip_ = 0;
    Eigen::MatrixXd factor_;
};

inline std::unique_ptr<CholeskySource> make_fbm_cholesky(double hurst, const TimeGrid& grid) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("sample_fbm: hurst must lie in (0, 1)");
    std::ostringstream os;
    os.precision(17);
    os << "fbm_cholesky(hurst=" << hurst << ")";
    return std::make_unique<CholeskySource>(
        grid, [hurst](double s, double t) { return fbm_covariance(hurst, s, t); }, os.str());
}

enum class NegativeEigenPolicy { Clip, Refuse };

// Stationary Gaussian sequence of length n_out by circulant embedding of the
// even reflection of c[0..L], L = c.size() - 1 >= n_out - 1. One FFT of size 2L
// yields two independent sequences.
class CirculantEmbedding {
public:
    CirculantEmbedding(const std::vector<double>& c, double rel_tol, NegativeEigenPolicy policy,
                       std::size_t n_out = 0)
        : n_(n_out == 0 ? c.size() : n_out) {
        if (n_ > c.size())
            throw DomainError("circulant embedding: covariance sequence shorter than the output");
        if (c.size() < 2) {
            m_ = 1;
            scale_ = {std::sqrt(std::fmax(c.empty() ? 0.0 : c[0], 0.0))};
            fft_ = std::make_unique<ComplexFft>(1);
            return;
        }
        const std::size_t L = c.size() - 1;
        m_ = 2 * L;
        fft_ = std::make_unique<ComplexFft>(m_);
        auto in = fftw_buffer<fftw_complex>(m_);
        auto out = fftw_buffer<fftw_complex>(m_);
        for (std::size_t k = 0; k < m_; ++k) {
            std::size_t j = k <= L ? k : m_ - k;
            in[k][0] = c[j];
            in[k][1] = 0.0;
        }
        fft_->execute(in.get(), out.get());
        double lmax = 0.0, lmin = 0.0, neg = 0.0, pos = 0.0;
        for (std::size_t k = 0; k < m_; ++k) {
            double l = out[k][0];
            lmax = std::fmax(lmax, l);
            lmin = std::fmin(lmin, l);
            if (l < 0.0)
                neg += -l;
            else
                pos += l;
        }
        min_eigen_ratio_ = lmax > 0.0 ? lmin / lmax : 0.0;
        if (lmin < -rel_tol * lmax && policy == NegativeEigenPolicy::Refuse) {
            std::ostringstream os;
            os << "circulant embedding: negative eigenvalue " << lmin << " (max " << lmax << ")";
            throw EmbeddingError(os.str());
        }
        distortion_ = pos > 0.0 ? neg / pos : 0.0;
        scale_.resize(m_);
        for (std::size_t k = 0; k < m_; ++k)
            scale_[k] = std::sqrt(std::fmax(out[k][0], 0.0) / static_cast<double>(m_));
    }

    std::size_t length() const { return n_; }
    double min_eigen_ratio() const { return min_eigen_ratio_; }
    double clipped_mass() const { return distortion_; }

    void draw_pair(NormalStream& z, double* a, double* b) const {
        auto w = fftw_buffer<fftw_complex>(m_);
        auto y = fftw_buffer<fftw_complex>(m_);
        for (std::size_t k = 0; k < m_; ++k) {
            w[k][0] = scale_[k] * z();
            w[k][1] = scale_[k] * z();
        }
        fft_->execute(w.get(), y.get());
        for (std::size_t j = 0; j < n_; ++j) {
            a[j] = y[j][0];
            b[j] = y[j][1];
        }
    }

private:
    std::size_t n_ = 0, m_ = 0;
    std::vector<double> scale_;
    std::unique_ptr<ComplexFft> fft_;
    double min_eigen_ratio_ = 0.0;
    double distortion_ = 0.0;
};

// Smallest L >= n with 2L a 2-3-5 smooth FFT length.
inline std::size_t smooth_half_length(std::size_t n) {
    std::size_t m = fft_good_size(2 * n);
    while (m % 2 != 0)
        m = fft_good_size(m + 1);
    return m / 2;
}

// FBM on a uniform grid from 0 as cumulative fractional Gaussian noise.
class FbmCirculantSource : public PathSource {
public:
    FbmCirculantSource(double hurst, TimeGrid grid) : hurst_(hurst), grid_(std::move(grid)) {
        if (!(hurst > 0.0 && hurst < 1.0))
            throw DomainError("sample_fbm: hurst must lie in (0, 1)");
        if (grid_.kind != GridKind::Uniform || grid_.points[0] != 0.0 || grid_.size() < 3)
            throw DomainError("sample_fbm: circulant route needs a uniform grid from 0");
        std::size_t n_inc = grid_.size() - 1;
        double h2 = 2.0 * hurst;
        double scale = std::pow(grid_.step, h2);
        std::size_t L = smooth_half_length(n_inc - 1);
        std::vector<double> c(L + 1);
        for (std::size_t k = 0; k <= L; ++k) {
            double kk = static_cast<double>(k);
            c[k] = 0.5 * scale * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(std::fabs(kk - 1.0), h2));
        }
        emb_ = std::make_unique<CirculantEmbedding>(c, 1e-9, NegativeEigenPolicy::Refuse, n_inc);
    }
    const TimeGrid& grid() const override { return grid_; }
    std::size_t paths_per_draw() const override { return 2; }
    void draw(std::uint64_t seed, std::size_t d, double* out) const override {
        NormalStream z(seed, d);
        const std::size_t n = grid_.size();
        std::vector<double> a(n - 1), b(n - 1);
        emb_->draw_pair(z, a.data(), b.data());
        double* pa = out;
        double* pb = out + n;
        pa[0] = pb[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            pa[i] = pa[i - 1] + a[i - 1];
            pb[i] = pb[i - 1] + b[i - 1];
        }
    }
    std::string tag() const override {
        std::ostringstream os;
        os.precision(17);
        os << "fbm_circulant(hurst=" << hurst_ << ")";
        return os.str();
    }

private:
    double hurst_;
    TimeGrid grid_;
    std::unique_ptr<CirculantEmbedding> emb_;
};

inline std::unique_ptr<PathSource> make_fbm_source(double hurst, const TimeGrid& grid) {
    if (grid.size() <= 2048)
        return make_fbm_cholesky(hurst, grid);
    if (grid.kind != GridKind::Uniform || grid.points[0] != 0.0)
        throw DomainError("sample_fbm: grids above 2048 points must be uniform from 0");
    try {
        return std::make_unique<FbmCirculantSource>(hurst, grid);
    } catch (const EmbeddingError&) {
        return make_fbm_cholesky(hurst, grid);
    }
}

inline PathEnsemble sample_fbm(double hurst, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                               unsigned workers = 1) {
    return collect(*make_fbm_source(hurst, grid), n_paths, seed, workers);
}

struct StationaryOptions {
    double negative_tolerance = 1e-7;
    NegativeEigenPolicy policy = NegativeEigenPolicy::Clip;
};

class StationarySource : public PathSource {
public:
    StationarySource(const CovarianceTable& table, double duration, StationaryOptions opt = {}) {
        if (!(duration > 0.0))
            throw DomainError("sample_stationary: duration must be positive");
        double steps = duration / table.lag_step;
        auto n_steps = static_cast<std::size_t>(std::llround(steps));
        if (std::fabs(steps - static_cast<double>(n_steps)) > 1e-9 * std::fmax(1.0, steps))
            throw DomainError("sample_stationary: duration must be a multiple of lag_step");
        if (n_steps > (std::size_t(1) << 22))
            throw DomainError("sample_stationary: duration / lag_step exceeds 2^22");
        if (table.n_lags() < n_steps)
            throw DomainError("sample_stationary: table does not cover the duration");
        grid_ = TimeGrid::uniform(table.lag_step, n_steps + 1);
        // Pad to a fast FFT length when the table reaches far enough.
        std::size_t L = smooth_half_length(n_steps);
        if (L > table.n_lags())
            L = n_steps;
        std::vector<double> c(table.values.begin(), table.values.begin() + static_cast<std::ptrdiff_t>(L + 1));
        emb_ = std::make_unique<CirculantEmbedding>(c, opt.negative_tolerance, opt.policy, n_steps + 1);
        tag_ = "stationary(" + table.params_tag + ")";
    }
    const TimeGrid& grid() const override { return grid_; }
    std::size_t paths_per_draw() const override { return 2; }
    void draw(std::uint64_t seed, std::size_t d, double* out) const override {
        NormalStream z(seed, d);
        emb_->draw_pair(z, out, out + grid_.size());
    }
    std::string tag() const override { return tag_; }
    const CirculantEmbedding& embedding() const { return *emb_; }

private:
    TimeGrid grid_;
    std::unique_ptr<CirculantEmbedding> emb_;
    std::string tag_;
};

inline PathEnsemble sample_stationary(const CovarianceTable& table, double duration, std::size_t n_paths,
                                      std::uint64_t seed, unsigned workers = 1, StationaryOptions opt = {}) {
    StationarySource src(table, duration, opt);
    return collect(src, n_paths, seed, workers);
}

// Riemann-Liouville integral of order alpha of a path given on a uniform grid
// from 0, using exact cell integrals of the kernel against each increment.
class RlConvolver {
public:
    RlConvolver(double alpha, const TimeGrid& grid) : alpha_(alpha), n_(grid.size()) {
        if (!(alpha > 0.0))
            throw DomainError("rl_integrate: alpha must be positive");
        if (grid.kind != GridKind::Uniform || grid.points[0] != 0.0)
            throw DomainError("rl_integrate: input grid must be uniform from 0");
        if (alpha == 1.0 || n_ < 2)
            return;
        const std::size_t nk = n_ - 1;
        p_ = fft_good_size(2 * nk);
        fft_ = std::make_unique<RealFft>(p_);
        auto k = fftw_buffer<double>(p_);
        kf_ = fftw_buffer<fftw_complex>(p_ / 2 + 1);
        double norm = std::pow(grid.step, alpha - 1.0) / std::tgamma(alpha + 1.0);
        for (std::size_t m = 0; m < p_; ++m)
            k[m] = 0.0;
        for (std::size_t m = 0; m < nk; ++m) {
            double j = static_cast<double>(m + 1);
            k[m] = norm * (std::pow(j, alpha) - std::pow(j - 1.0, alpha));
        }
        fft_->forward(k.get(), kf_.get());
    }

    void apply(const double* in, double* out) const {
        if (alpha_ == 1.0 || n_ < 2) {
            std::copy(in, in + n_, out);
            return;
        }
        auto d = fftw_buffer<double>(p_);
        auto df = fftw_buffer<fftw_complex>(p_ / 2 + 1);
        const std::size_t nk = n_ - 1;
        for (std::size_t i = 0; i < nk; ++i)
            d[i] = in[i + 1] - in[i];
        for (std::size_t i = nk; i < p_; ++i)
            d[i] = 0.0;
        fft_->forward(d.get(), df.get());
        for (std::size_t i = 0; i < p_ / 2 + 1; ++i) {
            double re = df[i][0] * kf_[i][0] - df[i][1] * kf_[i][1];
            double im = df[i][0] * kf_[i][1] + df[i][1] * kf_[i][0];
            df[i][0] = re;
            df[i][1] = im;
        }
        fft_->inverse(df.get(), d.get());
        double inv = 1.0 / static_cast<double>(p_);
        out[0] = 0.0;
        for (std::size_t i = 1; i < n_; ++i)
            out[i] = d[i - 1] * inv;
    }

private:
    double alpha_;
    std::size_t n_;
    std::size_t p_ = 0;
    std::unique_ptr<RealFft> fft_;
    FftwBuffer<fftw_complex> kf_;
};

class RlSource : public PathSource {
public:
    RlSource(std::shared_ptr<const PathSource> base, double alpha)
        : base_(std::move(base)), alpha_(alpha), conv_(alpha, base_->grid()) {}
    const TimeGrid& grid() const override { return base_->grid(); }
    std::size_t paths_per_draw() const override { return base_->paths_per_draw(); }
    void draw(std::uint64_t seed, std::size_t d, double* out) const override {
        const std::size_t n = grid().size();
        std::vector<double> tmp(n * paths_per_draw());
        base_->draw(seed, d, tmp.data());
        for (std::size_t p = 0; p < paths_per_draw(); ++p)
            conv_.apply(tmp.data() + p * n, out + p * n);
    }
    std::string tag() const override {
        std::ostringstream os;
        os.precision(17);
        os << "rl(alpha=" << alpha_ << ")<" << base_->tag() << ">";
        return os.str();
    }

private:
    std::shared_ptr<const PathSource> base_;
    double alpha_;
    RlConvolver conv_;
};

inline PathEnsemble rl_integrate(const PathEnsemble& e, double alpha, double base_hurst) {
    if (!(alpha + base_hurst - 1.0 > 0.0))
        throw DomainError("rl_integrate: kappa = alpha + H - 1 must be positive");
    RlConvolver conv(alpha, e.grid);
    PathEnsemble out;
    out.grid = e.grid;
    out.n_paths = e.n_paths;
    out.seed = e.seed;
    std::ostringstream os;
    os.precision(17);
    os << "rl(alpha=" << alpha << ")<" << e.generator_tag << ">";
    out.generator_tag = os.str();
    out.data.resize(e.data.size());
    for (std::size_t i = 0; i < e.n_paths; ++i)
        conv.apply(e.path(i).data(), out.path(i).data());
    return out;
}

// x(e^u) / (e^{u kappa} sigma1): stationary on the u grid, which is returned
// shifted to start at 0 with origin = u0.
inline PathEnsemble lamperti_normalize(const PathEnsemble& e, double kappa, double sigma1) {
    if (e.grid.kind != GridKind::Exponential)
        throw DomainError("lamperti_normalize: input grid must be exponential");
    if (!(kappa > 0.0) || !(sigma1 > 0.0))
        throw DomainError("lamperti_normalize: kappa and sigma1 must be positive");
    PathEnsemble out;
    out.grid = TimeGrid::uniform(e.grid.step, e.grid.size());
    out.grid.origin = e.grid.origin;
    out.n_paths = e.n_paths;
    out.seed = e.seed;
    out.generator_tag = "lamperti<" + e.generator_tag + ">";
    out.data.resize(e.data.size());
    const std::size_t n = e.n_points();
    std::vector<double> scale(n);
    for (std::size_t j = 0; j < n; ++j)
        scale[j] = 1.0 / (std::exp(kappa * e.grid.u(j)) * sigma1);
    for (std::size_t i = 0; i < e.n_paths; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.data[i * n + j] = e.data[i * n + j] * scale[j];
    return out;
}

} // namespace perslab

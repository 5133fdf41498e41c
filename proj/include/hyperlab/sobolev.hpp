#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>
#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "phasespace.hpp"
#include "weights.hpp"

namespace hyperlab {

using cplx = std::complex<double>;

/// Complex samples on the periodic grid x_j = -L + 2 L j / M, j = 0..M-1.
class GridFunction {
public:
    GridFunction() = default;

    GridFunction(double half_width, std::size_t points) : L_(half_width), values_(points, cplx{0.0, 0.0})
    {
        validate();
    }

    GridFunction(double half_width, std::vector<cplx> values) : L_(half_width), values_(std::move(values))
    {
        validate();
    }

    template <class F>
    static GridFunction sample(double half_width, std::size_t points, F&& f)
    {
        GridFunction g(half_width, points);
        for (std::size_t j = 0; j < points; ++j)
            g.values_[j] = cplx(f(g.x(j)));
        return g;
    }

    double half_width() const { return L_; }
    std::size_t size() const { return values_.size(); }
    double spacing() const { return 2.0 * L_ / static_cast<double>(values_.size()); }
    double x(std::size_t j) const { return -L_ + spacing() * static_cast<double>(j); }

    /// Angular frequency of FFT bin m: pi m / L for m < M/2, pi (m - M) / L otherwise.
    double frequency(std::size_t m) const
    {
        const auto M = static_cast<std::ptrdiff_t>(values_.size());
        auto idx = static_cast<std::ptrdiff_t>(m);
        if (idx >= M / 2)
            idx -= M;
        return M_PI * static_cast<double>(idx) / L_;
    }

    cplx& operator[](std::size_t j) { return values_[j]; }
    const cplx& operator[](std::size_t j) const { return values_[j]; }
    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }

    bool same_grid(const GridFunction& o) const { return L_ == o.L_ && size() == o.size(); }

private:
    void validate() const
    {
        require(L_ > 0.0, "GridFunction: half-width must be positive");
        require(values_.size() >= 8 && std::has_single_bit(values_.size()),
                "GridFunction: number of points must be a power of two >= 8");
    }

    double L_ = 1.0;
    std::vector<cplx> values_;
};

/// Discrete L2 norm with trapezoid weight 2L/M.
inline double l2_norm(const GridFunction& v)
{
    double s = 0.0;
    for (const auto& z : v.values())
        s += std::norm(z);
    return std::sqrt(s * v.spacing());
}

/// Applies a Fourier multiplier m(xi) on the periodic grid.
template <class Multiplier>
GridFunction apply_fourier_multiplier(const GridFunction& v, Multiplier&& m)
{
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, v.values());
    for (std::size_t j = 0; j < spec.size(); ++j)
        spec[j] *= m(v.frequency(j));
    std::vector<cplx> out;
    fft.inv(out, spec);
    return GridFunction(v.half_width(), std::move(out));
}

/// <D>_k^{s1} v: Fourier multiplier (k^2 + xi^2)^{s1/2}.
inline GridFunction bessel_potential(const GridFunction& v, double s1, double k)
{
    require(k >= 1.0, "bessel_potential: k must be >= 1");
    if (s1 == 0.0)
        return v;
    return apply_fourier_multiplier(v, [&](double xi) { return std::pow(k * k + xi * xi, 0.5 * s1); });
}

struct SobolevIndex {
    double s1 = 0.0; ///< derivative order
    double s2 = 0.0; ///< decay order
};

/// || Phi^{s2} <D>_k^{s1} v ||_{L2}: potential first, then the weight.
inline double sobolev_norm(const GridFunction& v, SobolevIndex s, double k, const WeightSpec& phi)
{
    GridFunction w = bessel_potential(v, s.s1, k);
    if (s.s2 != 0.0)
        for (std::size_t j = 0; j < w.size(); ++j)
            w[j] *= std::pow(phi(w.x(j)), s.s2);
    return l2_norm(w);
}

/// Writes values as little-endian (re, im) float64 pairs to <stem>.bin and a JSON sidecar
/// {L, M, timestamp, provenance} to <stem>.json.
inline void save_grid_function(const GridFunction& v, const std::filesystem::path& stem, const std::string& provenance,
                               const std::string& timestamp)
{
    static_assert(std::endian::native == std::endian::little, "binary grid format assumes a little-endian host");
    {
        std::ofstream bin(std::filesystem::path(stem).concat(".bin"), std::ios::binary);
        if (!bin)
            throw std::runtime_error("cannot write " + stem.string() + ".bin");
        for (const auto& z : v.values()) {
            const double parts[2] = {z.real(), z.imag()};
            bin.write(reinterpret_cast<const char*>(parts), sizeof(parts));
        }
    }
    nlohmann::json side = {{"L", v.half_width()},
                           {"M", v.size()},
                           {"timestamp", timestamp},
                           {"provenance", provenance},
                           {"layout", "little-endian float64 (re, im) pairs"}};
    std::ofstream js(std::filesystem::path(stem).concat(".json"));
    js << side.dump(2) << "\n";
}

inline GridFunction load_grid_function(const std::filesystem::path& stem)
{
    std::ifstream js(std::filesystem::path(stem).concat(".json"));
    if (!js)
        throw std::runtime_error("cannot read " + stem.string() + ".json");
    const auto side = nlohmann::json::parse(js);
    const double L = side.at("L").get<double>();
    const auto M = side.at("M").get<std::size_t>();
    std::ifstream bin(std::filesystem::path(stem).concat(".bin"), std::ios::binary);
    std::vector<cplx> vals(M);
    for (auto& z : vals) {
        double parts[2];
        if (!bin.read(reinterpret_cast<char*>(parts), sizeof(parts)))
            throw std::runtime_error("truncated grid file " + stem.string() + ".bin");
        z = {parts[0], parts[1]};
    }
    return GridFunction(L, std::move(vals));
}

} // namespace hyperlab

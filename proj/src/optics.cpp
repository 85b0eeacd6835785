#include "filmforge/optics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "filmforge/errors.hpp"

namespace filmforge {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

using cld = std::complex<long double>;

cld index_of(const MaterialRef& m, double wavelength_nm) {
    if (!m) return {1.0L, 0.0L};  // air
    std::complex<double> n = m->index_at(wavelength_nm);
    return {n.real(), n.imag()};
}

// Per-layer characteristic matrix in extended precision.
void layer_matrix(const Layer& layer, double wavelength_nm, cld m[4]) {
    cld n = index_of(layer.material, wavelength_nm);
    cld delta = cld(kTwoPi * layer.thickness_nm / wavelength_nm) * n;
    cld c = std::cos(delta);
    cld s = std::sin(delta);
    const cld i(0.0L, 1.0L);
    m[0] = c;
    m[1] = i * s / n;
    m[2] = i * n * s;
    m[3] = c;
}

}  // namespace

Matrix2c characteristic_matrix(const Layer& layer, double wavelength_nm) {
    if (!(layer.thickness_nm >= 0.0) || !std::isfinite(layer.thickness_nm))
        throw ValidationError("layer thickness must be finite and >= 0");
    cld m[4];
    layer_matrix(layer, wavelength_nm, m);
    Matrix2c out;
    for (int j = 0; j < 4; ++j)
        out[j] = {static_cast<double>(m[j].real()), static_cast<double>(m[j].imag())};
    return out;
}

RtaTriple evaluate_rta_unclamped(const StackDesign& stack, double wavelength_nm) {
    if (stack.layers.empty()) throw ValidationError("stack has no layers");
    if (!stack.substrate) throw ValidationError("stack has no substrate");

    // Accumulate M = M_1 * M_2 * ... * M_n incident-to-substrate, backing
    // included as an ordinary final layer.
    cld M[4] = {{1.0L, 0.0L}, {0.0L, 0.0L}, {0.0L, 0.0L}, {1.0L, 0.0L}};
    auto absorb = [&](const Layer& layer) {
        if (!(layer.thickness_nm >= 0.0) || !std::isfinite(layer.thickness_nm))
            throw ValidationError("layer thickness must be finite and >= 0");
        cld L[4];
        layer_matrix(layer, wavelength_nm, L);
        cld r0 = M[0] * L[0] + M[1] * L[2];
        cld r1 = M[0] * L[1] + M[1] * L[3];
        cld r2 = M[2] * L[0] + M[3] * L[2];
        cld r3 = M[2] * L[1] + M[3] * L[3];
        M[0] = r0; M[1] = r1; M[2] = r2; M[3] = r3;
    };
    for (const Layer& layer : stack.layers) absorb(layer);
    if (stack.backing) absorb(*stack.backing);

    cld eta0 = index_of(stack.incident_medium, wavelength_nm);
    cld etas = index_of(stack.substrate, wavelength_nm);
    cld B = M[0] + M[1] * etas;
    cld C = M[2] + M[3] * etas;

    cld denom = eta0 * B + C;
    cld r = (eta0 * B - C) / denom;
    long double R = std::norm(r);
    long double T = 4.0L * eta0.real() * etas.real() / std::norm(denom);
    long double A = 1.0L - R - T;

    RtaTriple out{static_cast<double>(R), static_cast<double>(T), static_cast<double>(A)};
    if (!std::isfinite(out.R) || !std::isfinite(out.T) || !std::isfinite(out.A))
        throw NumericError("non-finite R/T/A at " + std::to_string(wavelength_nm) + " nm (" +
                           std::to_string(stack.layers.size()) + "-layer stack)");
    return out;
}

RtaTriple evaluate_rta(const StackDesign& stack, double wavelength_nm) {
    RtaTriple out = evaluate_rta_unclamped(stack, wavelength_nm);
    if (std::abs(out.R + out.T + out.A - 1.0) > 1e-9)
        throw NumericError("R+T+A closure failure at " + std::to_string(wavelength_nm) + " nm");
    auto clamp01 = [](double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); };
    out.R = clamp01(out.R);
    out.T = clamp01(out.T);
    out.A = clamp01(out.A);
    return out;
}

namespace {

std::vector<double> make_grid(Band band, int grid_points) {
    if (grid_points < 2) throw ValidationError("grid_points must be >= 2");
    if (!(band.lo_nm <= band.hi_nm))
        throw ValidationError("band [" + std::to_string(band.lo_nm) + ", " +
                              std::to_string(band.hi_nm) + "] nm is not an interval");
    std::vector<double> grid(grid_points);
    double step = (band.hi_nm - band.lo_nm) / static_cast<double>(grid_points - 1);
    for (int i = 0; i < grid_points; ++i) grid[i] = band.lo_nm + step * static_cast<double>(i);
    grid.back() = band.hi_nm;  // keep the endpoint exact despite rounding
    return grid;
}

// Fixed-order reduction: identical bytes whether the grid was filled
// serially or in parallel.
void finish_means(SpectralResponse& r) {
    double sR = 0.0, sT = 0.0, sA = 0.0;
    for (std::size_t i = 0; i < r.wavelengths_nm.size(); ++i) {
        sR += r.R[i];
        sT += r.T[i];
        sA += r.A[i];
    }
    double n = static_cast<double>(r.wavelengths_nm.size());
    r.mean_R = sR / n;
    r.mean_T = sT / n;
    r.mean_A = sA / n;
}

}  // namespace

SpectralResponse spectral_response(const StackDesign& stack, Band band, int grid_points) {
    SpectralResponse r;
    r.wavelengths_nm = make_grid(band, grid_points);
    int n = static_cast<int>(r.wavelengths_nm.size());
    r.R.resize(n);
    r.T.resize(n);
    r.A.resize(n);

    // Grid points are independent; each iteration writes only its slot.
    // First error (if any) is rethrown after the loop.
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        try {
            RtaTriple t = evaluate_rta(stack, r.wavelengths_nm[i]);
            r.R[i] = t.R;
            r.T[i] = t.T;
            r.A[i] = t.A;
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);

    finish_means(r);
    return r;
}

SpectralResponse spectral_response_serial(const StackDesign& stack, Band band, int grid_points) {
    SpectralResponse r;
    r.wavelengths_nm = make_grid(band, grid_points);
    int n = static_cast<int>(r.wavelengths_nm.size());
    r.R.resize(n);
    r.T.resize(n);
    r.A.resize(n);
    for (int i = 0; i < n; ++i) {
        RtaTriple t = evaluate_rta(stack, r.wavelengths_nm[i]);
        r.R[i] = t.R;
        r.T[i] = t.T;
        r.A[i] = t.A;
    }
    finish_means(r);
    return r;
}

double aim_value(const SpectralResponse& response, const AimWeights& weights) {
    if (!std::isfinite(weights.w_T) || !std::isfinite(weights.w_R) || !std::isfinite(weights.w_A))
        throw ValidationError("aim weights must be finite");
    if (weights.w_T == 0.0 && weights.w_R == 0.0 && weights.w_A == 0.0)
        throw ValidationError("aim weights are all zero");
    return weights.w_T * response.mean_T + weights.w_R * response.mean_R +
           weights.w_A * response.mean_A;
}

void write_spectrum_csv(const SpectralResponse& response, std::ostream& out) {
    out << "wavelength_nm,R,T,A\n";
    char buf[128];
    for (std::size_t i = 0; i < response.wavelengths_nm.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g\n", response.wavelengths_nm[i],
                      response.R[i], response.T[i], response.A[i]);
        out << buf;
    }
}

}  // namespace filmforge

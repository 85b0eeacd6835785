#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

#include "filmforge/materials.hpp"

namespace filmforge {

struct Layer {
    MaterialRef material;
    double thickness_nm = 0.0;
};

// Layered coating at normal incidence: incident medium (air when unset),
// layers ordered from the incident side, an optional fixed opaque backing
// (kept out of any optimizer state), and a semi-infinite substrate.
struct StackDesign {
    MaterialRef incident_medium;  // null = air, N = 1 - 0i
    std::vector<Layer> layers;
    std::optional<Layer> backing;
    MaterialRef substrate;
};

// Inclusive uniform wavelength grid.
struct Band {
    double lo_nm = 0.0;
    double hi_nm = 0.0;
    bool operator==(const Band&) const = default;
};

struct SpectralResponse {
    std::vector<double> wavelengths_nm;
    std::vector<double> R;
    std::vector<double> T;
    std::vector<double> A;
    double mean_R = 0.0;
    double mean_T = 0.0;
    double mean_A = 0.0;
};

struct AimWeights {
    double w_T = 0.0;
    double w_R = 0.0;
    double w_A = 0.0;
    bool operator==(const AimWeights&) const = default;
};

struct RtaTriple {
    double R, T, A;
};

using Matrix2c = std::array<std::complex<double>, 4>;  // row-major [m00 m01 m10 m11]

// Characteristic matrix of one layer:
//   [[cos d, i sin d / eta], [i eta sin d, cos d]]
// with phase thickness d = 2 pi N t / lambda and admittance eta = N
// (free-space admittance normalized to 1). N = n - i*k.
Matrix2c characteristic_matrix(const Layer& layer, double wavelength_nm);

// Full-stack reflectance/transmittance/absorptance at one wavelength.
// Multiplies layer matrices incident-to-substrate (backing last) into
// [B; C] against the substrate admittance, then
//   R = |(eta0 B - C) / (eta0 B + C)|^2
//   T = 4 eta0 Re(eta_s) / |eta0 B + C|^2
//   A = 1 - R - T
// clamped to [0, 1] after the R+T+A closure check (1e-9). Throws
// NumericError naming the wavelength when an intermediate value is
// non-finite. The unclamped variant exposes the raw values so closure
// can be asserted before floating-point hygiene is applied.
RtaTriple evaluate_rta(const StackDesign& stack, double wavelength_nm);
RtaTriple evaluate_rta_unclamped(const StackDesign& stack, double wavelength_nm);

// Response over a uniform inclusive grid (grid_points >= 2); band means
// are plain arithmetic means accumulated in grid order. The default entry
// point evaluates grid points in parallel (OpenMP); the serial variant is
// the reference implementation and must agree bit-for-bit.
SpectralResponse spectral_response(const StackDesign& stack, Band band, int grid_points);
SpectralResponse spectral_response_serial(const StackDesign& stack, Band band, int grid_points);

// Eq-style scalar merit: w_T * mean_T + w_R * mean_R + w_A * mean_A.
double aim_value(const SpectralResponse& response, const AimWeights& weights);

// `wavelength_nm,R,T,A` rows, 6 significant digits, \n endings.
void write_spectrum_csv(const SpectralResponse& response, std::ostream& out);

}  // namespace filmforge

#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace filmforge {

// One tabulated (wavelength, n, k) sample. Wavelengths are nanometers
// everywhere in this library; loaders for micrometer files convert at
// ingestion.
struct MaterialSample {
    double wavelength_nm;
    double n;
    double k;
};

// Tabulated optical constants for one material, immutable after
// construction and safe to share across threads.
//
// Complex index convention: N = n - i*k with e^{+i w t} time dependence.
class MaterialTable {
public:
    // Validates: >= 2 samples, strictly increasing wavelengths after
    // sorting, n >= 0, k >= 0, all finite. Throws ValidationError.
    MaterialTable(std::string name, std::vector<MaterialSample> samples);

    const std::string& name() const { return name_; }
    const std::vector<MaterialSample>& samples() const { return samples_; }
    double min_wavelength_nm() const { return samples_.front().wavelength_nm; }
    double max_wavelength_nm() const { return samples_.back().wavelength_nm; }

    // Linear interpolation of n and k between the bracketing samples;
    // exact table values at sample wavelengths. No extrapolation: a
    // wavelength outside [min, max] throws OutOfRangeError naming the
    // material and its valid range.
    std::complex<double> index_at(double wavelength_nm) const;

    bool covers(double lo_nm, double hi_nm) const {
        return min_wavelength_nm() <= lo_nm && hi_nm <= max_wavelength_nm();
    }

private:
    std::string name_;
    std::vector<MaterialSample> samples_;
};

using MaterialRef = std::shared_ptr<const MaterialTable>;

// Parses the material CSV format:
//   header line exactly `wavelength_nm,n,k` or `wavelength_um,n,k`,
//   then comma-separated numeric rows, `\n` endings. Lines starting
//   with `#` and blank lines are skipped. Micrometer files are
//   converted to nanometers. Rows are re-sorted to ascending
//   wavelength; duplicates are a ValidationError.
MaterialTable load_material_table(std::istream& in, const std::string& name);
MaterialTable load_material_table_file(const std::string& path, const std::string& name);

// Writes `wavelength_nm,n,k` rows with round-trip-exact precision.
void save_material_table(const MaterialTable& table, std::ostream& out);

// One uncovered sub-interval of the requested band for one material.
struct CoverageGap {
    std::string material;
    double missing_lo_nm;
    double missing_hi_nm;
};

// Empty result means every table covers [band_lo, band_hi]. Throws
// ValidationError for an empty table set or an inverted band.
std::vector<CoverageGap> coverage_check(const std::vector<MaterialRef>& tables,
                                        double band_lo_nm, double band_hi_nm);

// Constant-index material spanning [lo, hi], used for synthetic media in
// tests and for the built-in incident air reference.
MaterialRef make_constant_material(const std::string& name, double n, double k,
                                   double lo_nm = 200.0, double hi_nm = 2000.0);

}  // namespace filmforge

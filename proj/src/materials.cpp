#include "filmforge/materials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "filmforge/errors.hpp"

namespace filmforge {

MaterialTable::MaterialTable(std::string name, std::vector<MaterialSample> samples)
    : name_(std::move(name)), samples_(std::move(samples)) {
    if (samples_.size() < 2)
        throw ValidationError("material '" + name_ + "': needs at least 2 samples, got " +
                              std::to_string(samples_.size()));
    std::sort(samples_.begin(), samples_.end(),
              [](const MaterialSample& a, const MaterialSample& b) {
                  return a.wavelength_nm < b.wavelength_nm;
              });
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.wavelength_nm) || !std::isfinite(s.n) || !std::isfinite(s.k))
            throw ValidationError("material '" + name_ + "': non-finite sample at " +
                                  std::to_string(s.wavelength_nm) + " nm");
        if (s.n < 0.0)
            throw ValidationError("material '" + name_ + "': negative n at " +
                                  std::to_string(s.wavelength_nm) + " nm");
        if (s.k < 0.0)
            throw ValidationError("material '" + name_ + "': negative k at " +
                                  std::to_string(s.wavelength_nm) + " nm");
        if (i > 0 && !(samples_[i - 1].wavelength_nm < s.wavelength_nm))
            throw ValidationError("material '" + name_ + "': duplicate wavelength " +
                                  std::to_string(s.wavelength_nm) + " nm");
    }
}

std::complex<double> MaterialTable::index_at(double wavelength_nm) const {
    if (wavelength_nm < min_wavelength_nm() || wavelength_nm > max_wavelength_nm())
        throw OutOfRangeError("material '" + name_ + "': wavelength " +
                              std::to_string(wavelength_nm) + " nm outside tabulated range [" +
                              std::to_string(min_wavelength_nm()) + ", " +
                              std::to_string(max_wavelength_nm()) + "] nm");

    auto it = std::lower_bound(samples_.begin(), samples_.end(), wavelength_nm,
                               [](const MaterialSample& s, double w) {
                                   return s.wavelength_nm < w;
                               });
    // Exact sample hit returns stored values bit-for-bit.
    if (it != samples_.end() && it->wavelength_nm == wavelength_nm)
        return {it->n, -it->k};

    const MaterialSample& hi = *it;
    const MaterialSample& lo = *(it - 1);
    double t = (wavelength_nm - lo.wavelength_nm) / (hi.wavelength_nm - lo.wavelength_nm);
    double n = lo.n + t * (hi.n - lo.n);
    double k = lo.k + t * (hi.k - lo.k);
    return {n, -k};
}

namespace {

double parse_field(const std::string& field, int line_no, const char* what) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError(std::string("bad ") + what + " field '" + field + "'", line_no);
    return value;
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

MaterialTable load_material_table(std::istream& in, const std::string& name) {
    std::string line;
    int line_no = 0;
    double unit_scale = 0.0;  // nm per file unit; 0 until the header is seen
    std::vector<MaterialSample> samples;

    while (std::getline(in, line)) {
        ++line_no;
        std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;

        if (unit_scale == 0.0) {
            if (s == "wavelength_nm,n,k")
                unit_scale = 1.0;
            else if (s == "wavelength_um,n,k")
                unit_scale = 1000.0;
            else
                throw ParseError("expected header 'wavelength_nm,n,k' or 'wavelength_um,n,k', got '" +
                                     s + "'",
                                 line_no);
            continue;
        }

        std::istringstream ss(s);
        std::string f0, f1, f2, extra;
        if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') || !std::getline(ss, f2, ','))
            throw ParseError("expected 3 comma-separated fields, got '" + s + "'", line_no);
        if (std::getline(ss, extra, ','))
            throw ParseError("expected 3 comma-separated fields, got more in '" + s + "'", line_no);

        MaterialSample sample;
        sample.wavelength_nm = parse_field(f0, line_no, "wavelength") * unit_scale;
        sample.n = parse_field(f1, line_no, "n");
        sample.k = parse_field(f2, line_no, "k");
        samples.push_back(sample);
    }
    if (unit_scale == 0.0) throw ParseError("missing header line in material '" + name + "'");

    return MaterialTable(name, std::move(samples));
}

MaterialTable load_material_table_file(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open material file '" + path + "'");
    return load_material_table(in, name);
}

void save_material_table(const MaterialTable& table, std::ostream& out) {
    out << "wavelength_nm,n,k\n";
    char buf[96];
    for (const auto& s : table.samples()) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.wavelength_nm, s.n, s.k);
        out << buf;
    }
}

std::vector<CoverageGap> coverage_check(const std::vector<MaterialRef>& tables,
                                        double band_lo_nm, double band_hi_nm) {
    if (tables.empty()) throw ValidationError("coverage check on empty material set");
    if (!(band_lo_nm < band_hi_nm))
        throw ValidationError("coverage band [" + std::to_string(band_lo_nm) + ", " +
                              std::to_string(band_hi_nm) + "] nm is not an interval");

    std::vector<CoverageGap> gaps;
    for (const auto& t : tables) {
        if (!t) throw ValidationError("coverage check on null material reference");
        if (t->min_wavelength_nm() > band_lo_nm)
            gaps.push_back({t->name(), band_lo_nm,
                            std::min(t->min_wavelength_nm(), band_hi_nm)});
        if (t->max_wavelength_nm() < band_hi_nm)
            gaps.push_back({t->name(), std::max(t->max_wavelength_nm(), band_lo_nm),
                            band_hi_nm});
    }
    return gaps;
}

MaterialRef make_constant_material(const std::string& name, double n, double k,
                                   double lo_nm, double hi_nm) {
    std::vector<MaterialSample> samples{{lo_nm, n, k}, {hi_nm, n, k}};
    return std::make_shared<const MaterialTable>(name, std::move(samples));
}

}  // namespace filmforge

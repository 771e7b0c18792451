#include "sls/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sls {

namespace {

// Shortest representation that round-trips.
void put(std::ostream& os, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
  return os;
}

double number_or_nan(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::numeric_limits<double>::quiet_NaN();
  return it->get<double>();
}

template <typename Column>
void write_columns(const std::filesystem::path& file, const Grid<double>& grid, int stride,
                   const std::vector<std::string>& names, Column&& column) {
  if (stride < 1) throw std::invalid_argument("snapshot stride must be >= 1");
  std::ofstream os = open_out(file);
  os << "z";
  for (const auto& n : names) os << ",re_" << n << ",im_" << n;
  os << ",intensity\n";
  for (Eigen::Index j = 0; j < grid.n_points(); j += stride) {
    put(os, grid.z()[j]);
    double intensity = 0;
    for (std::size_t c = 0; c < names.size(); ++c) {
      const std::complex<double> v = column(j, c);
      os << ',';
      put(os, v.real());
      os << ',';
      put(os, v.imag());
      if (c < 2) intensity += std::norm(v);
    }
    os << ',';
    put(os, intensity);
    os << '\n';
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

nlohmann::ordered_json to_json(const ObservableRecord<double>& r) {
  nlohmann::ordered_json j;
  j["t"] = r.t;
  j["norm"] = r.norm;
  j["com"] = r.com;
  j["width"] = r.width;
  j["com_left"] = r.com_left;
  j["com_right"] = r.com_right;
  j["peak_left"] = r.peak_left;
  j["peak_right"] = r.peak_right;
  j["lobe_contrast"] = r.lobe_contrast;
  if (std::isnan(r.norm_in_well))
    j["norm_in_well"] = nullptr;
  else
    j["norm_in_well"] = r.norm_in_well;
  j["valid"] = r.valid;
  return j;
}

nlohmann::ordered_json to_json(const DerivedParams<double>& p) {
  nlohmann::ordered_json j;
  j["l_abs"] = p.l_abs;
  j["tan2_theta"] = p.tan2_theta;
  j["cos_theta"] = p.cos_theta;
  j["cos2_theta"] = p.cos2_theta;
  j["v_gr"] = p.v_gr;
  j["c_star"] = p.c_star;
  j["m_star"] = p.m_star;
  j["lambda_c"] = p.lambda_c;
  j["beta"] = p.beta;
  j["rest_energy"] = p.rest_energy;
  j["zitter_freq"] = p.zitter_freq;
  j["gamma_over_delta"] = p.gamma_over_delta;
  j["weak_detuning"] = p.weak_detuning;
  return j;
}

nlohmann::ordered_json to_json(const MediumConfig<double>& m) {
  nlohmann::ordered_json j;
  j["gamma"] = m.gamma;
  j["delta"] = m.delta;
  j["omega"] = m.omega;
  j["g2n"] = m.g2n;
  j["c"] = m.c;
  return j;
}

void write_ndjson_line(std::ostream& os, const nlohmann::ordered_json& j) { os << j.dump() << '\n'; }

void write_observables(const std::filesystem::path& file, const ObservableSeries<double>& series) {
  std::ofstream os = open_out(file);
  for (const auto& r : series.records) write_ndjson_line(os, to_json(r));
}

void write_json(const std::filesystem::path& file, const nlohmann::ordered_json& j) {
  std::ofstream os = open_out(file);
  os << j.dump(2) << '\n';
}

ObservableSeries<double> read_observables(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot open " + file.string());
  ObservableSeries<double> series;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    ObservableRecord<double> r;
    r.t = j.at("t").get<double>();
    r.norm = number_or_nan(j, "norm");
    r.com = number_or_nan(j, "com");
    r.width = number_or_nan(j, "width");
    r.com_left = number_or_nan(j, "com_left");
    r.com_right = number_or_nan(j, "com_right");
    r.peak_left = number_or_nan(j, "peak_left");
    r.peak_right = number_or_nan(j, "peak_right");
    r.lobe_contrast = number_or_nan(j, "lobe_contrast");
    r.norm_in_well = number_or_nan(j, "norm_in_well");
    r.valid = j.value("valid", false);
    series.push_back(r);
  }
  return series;
}

void write_snapshot_mb(const std::filesystem::path& file, const Grid<double>& grid,
                       const MBState<double>& s, int stride) {
  write_columns(file, grid, stride,
                {"eps_plus", "eps_minus", "sigma_gs", "sigma_gep", "sigma_gem"},
                [&](Eigen::Index j, std::size_t c) { return s.fields(j, Eigen::Index(c)); });
}

void write_snapshot_spinor(const std::filesystem::path& file, const Grid<double>& grid,
                           const SpinorState<double>& bare, int stride) {
  if (bare.basis != Basis::bare) throw std::invalid_argument("snapshot expects the bare basis");
  write_columns(file, grid, stride, {"plus", "minus"},
                [&](Eigen::Index j, std::size_t c) { return bare.comps(j, Eigen::Index(c)); });
}

void write_snapshot_sum_mode(const std::filesystem::path& file, const Grid<double>& grid,
                             const SumModeState<double>& s, int stride) {
  write_columns(file, grid, stride, {"sum"},
                [&](Eigen::Index j, std::size_t) { return s.field[j]; });
}

void write_spectrum(const std::filesystem::path& file, const Spectrum<double>& spectrum) {
  std::ofstream os = open_out(file);
  os << "omega,magnitude\n";
  for (std::size_t j = 0; j < spectrum.omega.size(); ++j) {
    put(os, spectrum.omega[j]);
    os << ',';
    put(os, spectrum.magnitude[j]);
    os << '\n';
  }
}

}  // namespace sls

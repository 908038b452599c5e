#include "stenfuse/machine.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "stenfuse/toml.hpp"

namespace stenfuse {

void MachineProfile::validate() const {
  const bool ok = !name.empty() && peak_bw_gib_s > 0 && peak_fp64_tflops > 0 &&
                  peak_fp32_tflops > 0 && tdp_w > 0 && simd_width > 0 && cache_line_bytes > 0 &&
                  shared_kib > 0;
  if (!ok) throw config_error("machine profile '" + name + "': all figures must be positive");
}

double machine_balance(const MachineProfile& p, Dtype dtype) {
  p.validate();
  const double flops = (dtype == Dtype::f64 ? p.peak_fp64_tflops : p.peak_fp32_tflops) * 1e12;
  const double words_per_s = p.peak_bw_gib_s * kGiB / dtype_bytes(dtype);
  return flops / words_per_s;
}

MachineProfile parse_machine_profile(const std::string& text, const std::string& origin) {
  const toml::Table t = toml::Table::parse(text, origin);
  MachineProfile p;
  p.name = t.get_string("name", "");
  p.peak_bw_gib_s = t.get_double("peak_bw_gib_s", 0);
  p.peak_fp64_tflops = t.get_double("peak_fp64_tflops", 0);
  p.peak_fp32_tflops = t.get_double("peak_fp32_tflops", 0);
  p.tdp_w = t.get_double("tdp_w", 0);
  p.simd_width = static_cast<int>(t.get_int("simd_width", 0));
  p.cache_line_bytes = static_cast<int>(t.get_int("cache_line_bytes", 0));
  p.shared_kib = t.get_double("shared_kib", 0);
  p.l1_kib = t.get_double("l1_kib", 0);
  p.l2_mib = t.get_double("l2_mib", 0);

  static const char* known[] = {"name",       "peak_bw_gib_s", "peak_fp64_tflops",
                                "peak_fp32_tflops", "tdp_w",   "simd_width",
                                "cache_line_bytes", "shared_kib", "l1_kib", "l2_mib"};
  for (const auto& key : t.keys()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) t.fail(key, "unknown machine-profile key");
  }
  p.validate();
  return p;
}

MachineProfile load_machine_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open machine profile: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_machine_profile(ss.str(), path);
}

std::string serialize_machine_profile(const MachineProfile& p) {
  std::ostringstream os;
  os.precision(17);
  os << "name = \"" << p.name << "\"\n";
  os << "peak_bw_gib_s = " << p.peak_bw_gib_s << "\n";
  os << "peak_fp64_tflops = " << p.peak_fp64_tflops << "\n";
  os << "peak_fp32_tflops = " << p.peak_fp32_tflops << "\n";
  os << "tdp_w = " << p.tdp_w << "\n";
  os << "simd_width = " << p.simd_width << "\n";
  os << "cache_line_bytes = " << p.cache_line_bytes << "\n";
  os << "shared_kib = " << p.shared_kib << "\n";
  os << "l1_kib = " << p.l1_kib << "\n";
  os << "l2_mib = " << p.l2_mib << "\n";
  return os.str();
}

}  // namespace stenfuse

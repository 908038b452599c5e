#pragma once

#include <string>

#include "stenfuse/common.hpp"

namespace stenfuse {

inline constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;

// Hardware figures used for derived metrics and plan pruning. Loaded
// from TOML files whose keys mirror the field names.
struct MachineProfile {
  std::string name;
  double peak_bw_gib_s = 0;
  double peak_fp64_tflops = 0;
  double peak_fp32_tflops = 0;
  double tdp_w = 0;
  int simd_width = 0;
  int cache_line_bytes = 0;
  double shared_kib = 0;  // software-managed tile buffer capacity
  double l1_kib = 0;      // informational
  double l2_mib = 0;      // informational

  void validate() const;

  friend bool operator==(const MachineProfile&, const MachineProfile&) = default;
};

// Peak FLOPs per word moved at the given precision: the operational
// intensity where compute and bandwidth limits meet.
double machine_balance(const MachineProfile& p, Dtype dtype);

MachineProfile load_machine_profile(const std::string& path);
MachineProfile parse_machine_profile(const std::string& text, const std::string& origin = "");
std::string serialize_machine_profile(const MachineProfile& p);

}  // namespace stenfuse

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kgz/evolution.hpp"
#include "kgz/soliton.hpp"

namespace kgz {

/// Run configuration. Every section is optional; defaults are shown.
struct RunConfig {
  SystemParams system;
  std::vector<SolitonSpec> solitons;

  std::size_t grid_n = 2048;
  double grid_length = 100.0;

  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 1e-3;
  Scheme scheme = Scheme::Lawson;
  bool dealias = true;
  std::string initial;  // optional snapshot replacing the soliton initial state

  std::string out_dir;
  std::size_t stride = 100;

  double construction_t0 = 20.0;
  std::vector<double> tn_list;
  bool has_construction = false;

  int spectrum_count = 4;
  std::string spectrum_operator = "L1";
  std::size_t spectrum_soliton = 0;
  std::string spectrum_method = "auto";

  double modulation_tol = 1e-10;
  int modulation_max_iter = 50;
};

/// Parses a JSON document. `overrides` are "path=value" strings such as
/// "grid.n=1024" or "solitons[0].omega=0.5", applied before validation.
/// Throws ConfigError naming the offending field.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace kgz

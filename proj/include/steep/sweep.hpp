#ifndef STEEP_SWEEP_HPP
#define STEEP_SWEEP_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace steep::sweep {

// Grid sweep over one scheme's parameter space. Grids are either explicit
// value lists or log ranges {from, to, factor}. Row order is the odometer
// over the scheme's documented parameter order, last parameter fastest.
struct SweepSpec {
  std::string scheme;  // gsteep | psteep | msteep | classic
  std::map<std::string, std::vector<double>> grid;
  std::uint64_t seed = 0;
  std::string format = "csv";  // csv | jsonl
  std::string out_path;        // empty: stdout
  std::size_t max_rows = 1000000;
};

struct ValidationSpec {
  std::vector<std::string> suites;  // subset of {formula-vs-oracle, cross-path,
                                    //            properties, dual-route}
  std::string filter;               // substring filter on check names
  long mc_samples = 1000000;
  long psk_symbols = 100000;
  int configs_per_scheme = 20;
  double z_max = 3.0;
  double cross_tol = 1e-9;
  std::uint64_t seed = 20240613;
  int jobs = 1;
  std::string out_path;  // empty: stdout
};

// Strict parsers: unknown keys are rejected by name, grids must be nonempty,
// schemes recognized. Input is a JSON document.
SweepSpec parse_sweep_spec(const std::string& json_text);
ValidationSpec parse_validation_spec(const std::string& json_text);

// Column names for the scheme, fixed and documented in the README.
std::vector<std::string> sweep_columns(const std::string& scheme);

struct SweepRow {
  std::vector<double> values;  // aligned with sweep_columns(scheme)
  std::string error;           // nonempty: computation failed, values are NaN
};

struct SweepResult {
  std::string scheme;
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;
};

// Evaluates every grid point; per-row errors are recorded, not fatal.
// Deterministic for fixed spec+seed regardless of jobs.
SweepResult run_sweep(const SweepSpec& spec, int jobs = 1);

// 17-significant-digit CSV (RFC-4180 quoting) or JSON-lines rendering.
std::string render_csv(const SweepResult& result);
std::string render_jsonl(const SweepResult& result);

}  // namespace steep::sweep

#endif

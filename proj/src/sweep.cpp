#include "steep/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include <json.hpp>

#include "steep/channel.hpp"
#include "steep/errors.hpp"
#include "steep/gsteep.hpp"
#include "steep/msteep.hpp"
#include "steep/psteep.hpp"

namespace steep::sweep {

namespace {

using nlohmann::json;

const std::vector<std::string>& scheme_params(const std::string& scheme) {
  static const std::vector<std::string> gsteep = {"a", "b", "alpha", "beta"};
  static const std::vector<std::string> psteep = {"m", "a", "b", "alpha", "beta"};
  static const std::vector<std::string> msteep = {"m", "sigma2", "sigma2_a", "sigma2_e",
                                                  "sigma2_ea"};
  static const std::vector<std::string> classic = {"n_a", "n_b", "n_e", "p_a"};
  if (scheme == "gsteep") return gsteep;
  if (scheme == "psteep") return psteep;
  if (scheme == "msteep") return msteep;
  if (scheme == "classic") return classic;
  throw InvalidArgument("unknown scheme '" + scheme + "'");
}

const std::vector<std::string>& scheme_outputs(const std::string& scheme) {
  static const std::vector<std::string> gsteep = {"c_user", "c_eve", "r_s", "c_key",
                                                  "b_threshold"};
  static const std::vector<std::string> psteep = {
      "p_e_alice", "p_e_eve", "c_user",         "c_eve",
      "r_s",       "r_s_h2",  "power_condition", "ratio_bound", "bound_exponent"};
  static const std::vector<std::string> msteep = {"g_a", "g_e", "r_last", "r_total",
                                                  "sigma2_a_threshold"};
  static const std::vector<std::string> classic = {"rate", "alpha"};
  if (scheme == "gsteep") return gsteep;
  if (scheme == "psteep") return psteep;
  if (scheme == "msteep") return msteep;
  if (scheme == "classic") return classic;
  throw InvalidArgument("unknown scheme '" + scheme + "'");
}

std::vector<double> parse_grid_entry(const std::string& key, const json& v) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw InvalidArgument("grid '" + key + "': non-numeric entry");
      out.push_back(e.get<double>());
    }
  } else if (v.is_object()) {
    for (const auto& [k, unused] : v.items()) {
      if (k != "from" && k != "to" && k != "factor") {
        throw InvalidArgument("grid '" + key + "': unknown range key '" + k + "'");
      }
    }
    if (!v.contains("from") || !v.contains("to") || !v.contains("factor")) {
      throw InvalidArgument("grid '" + key + "': range needs from/to/factor");
    }
    const double from = v["from"].get<double>();
    const double to = v["to"].get<double>();
    const double factor = v["factor"].get<double>();
    if (!(from > 0.0) || !(to >= from) || !(factor > 1.0)) {
      throw InvalidArgument("grid '" + key + "': need 0 < from <= to and factor > 1");
    }
    for (double x = from; x <= to * (1.0 + 1e-12); x *= factor) out.push_back(x);
  } else {
    throw InvalidArgument("grid '" + key + "': expected number, list, or range object");
  }
  if (out.empty()) throw InvalidArgument("grid '" + key + "' is empty");
  return out;
}

int as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
    throw InvalidArgument(std::string(what) + " must be a positive integer");
  }
  return static_cast<int>(v);
}

// Row-local channel seed so sweeps stay reproducible under any jobs count.
std::uint64_t row_seed(std::uint64_t seed, std::size_t row) {
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ull + (row << 1));
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  return z;
}

SweepRow eval_row(const SweepSpec& spec, const std::vector<double>& params,
                  std::size_t row_index) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SweepRow row;
  row.values = params;
  const auto& outs = scheme_outputs(spec.scheme);
  const std::size_t base = params.size();
  row.values.resize(base + outs.size(), nan);
  try {
    if (spec.scheme == "gsteep") {
      const SisoSnr snr{params[0], params[1], params[2], params[3]};
      const SecrecyBreakdown b = siso_secrecy_rate(snr);
      row.values[base + 0] = b.c_user;
      row.values[base + 1] = b.c_eve;
      row.values[base + 2] = b.r_s;
      row.values[base + 3] = siso_key_capacity(snr.a, snr.alpha);
      row.values[base + 4] = siso_threshold_b(snr.a, snr.alpha, snr.beta);
    } else if (spec.scheme == "psteep") {
      const int m = as_count(params[0], "m");
      const SisoSnr snr{params[1], params[2], params[3], params[4]};
      const PskErrorParams pe = psk_error_params(m, snr);
      const PsteepRate rate = psteep_secrecy_rate(m, snr);
      const bool cond = psteep_power_condition(snr);
      row.values[base + 0] = pe.p_ea;
      row.values[base + 1] = pe.p_ee;
      row.values[base + 2] = rate.c_user;
      row.values[base + 3] = rate.c_eve;
      row.values[base + 4] = rate.r_s;
      row.values[base + 5] = rate.r_s_h2;
      row.values[base + 6] = cond ? 1.0 : 0.0;
      if (cond) {
        const ErrorRatioBound bound = error_ratio_bound(m, snr);
        row.values[base + 7] = bound.bound;
        row.values[base + 8] = bound.exponent;
      }
    } else if (spec.scheme == "msteep") {
      const int m = as_count(params[0], "m");
      const SymmetricAnalysis sym =
          symmetric_analysis(params[1], params[2], params[3], params[4], m);
      double total = 0.0;
      for (double t : sym.r_terms) total += t;
      row.values[base + 0] = sym.g_a;
      row.values[base + 1] = sym.g_e;
      row.values[base + 2] = sym.r_terms.back();
      row.values[base + 3] = total;
      const double beta0 = params[2] / params[3];
      if (beta0 > 1.0) {
        row.values[base + 4] = symmetric_threshold(beta0, params[1], params[4], m);
      }
    } else {  // classic
      const int n_a = as_count(params[0], "n_a");
      const int n_b = as_count(params[1], "n_b");
      const int n_e = as_count(params[2], "n_e");
      const ChannelSet cs = sample_channels(n_a, n_b, n_e, row_seed(spec.seed, row_index));
      const PowerConfig pw{params[3], 1.0};
      row.values[base + 0] =
          classic_wtc_rate(cs, pw, Matrix::Identity(n_a, n_a));
      try {
        row.values[base + 1] = channel_strength_ratio_alpha(cs.h_ea, cs.h_ba);
      } catch (const NotApplicable&) {
        // alpha undefined for this realization; rate column still stands
      }
    }
  } catch (const std::exception& e) {
    row.error = e.what();
    for (std::size_t i = base; i < row.values.size(); ++i) {
      row.values[i] = nan;
    }
  }
  return row;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  SweepSpec spec;
  bool have_scheme = false, have_grid = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "scheme") {
      spec.scheme = value.get<std::string>();
      have_scheme = true;
    } else if (key == "grid") {
      if (!value.is_object()) throw InvalidArgument("'grid' must be an object");
      have_grid = true;
      for (const auto& [gk, gv] : value.items()) {
        spec.grid[gk] = parse_grid_entry(gk, gv);
      }
    } else if (key == "seed") {
      spec.seed = value.get<std::uint64_t>();
    } else if (key == "format") {
      spec.format = value.get<std::string>();
    } else if (key == "out") {
      spec.out_path = value.get<std::string>();
    } else if (key == "max_rows") {
      spec.max_rows = value.get<std::size_t>();
    } else {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }
  if (!have_scheme) throw InvalidArgument("config missing 'scheme'");
  if (!have_grid) throw InvalidArgument("config missing 'grid'");
  if (spec.format != "csv" && spec.format != "jsonl") {
    throw InvalidArgument("format must be 'csv' or 'jsonl'");
  }
  const auto& names = scheme_params(spec.scheme);
  for (const auto& [gk, unused] : spec.grid) {
    if (std::find(names.begin(), names.end(), gk) == names.end()) {
      throw InvalidArgument("unknown grid parameter '" + gk + "' for scheme " + spec.scheme);
    }
  }
  std::size_t rows = 1;
  for (const auto& name : names) {
    auto it = spec.grid.find(name);
    if (it == spec.grid.end()) {
      throw InvalidArgument("grid missing parameter '" + name + "' for scheme " + spec.scheme);
    }
    rows *= it->second.size();
    if (rows > spec.max_rows) {
      throw InvalidArgument("grid has more than max_rows points");
    }
  }
  return spec;
}

ValidationSpec parse_validation_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  ValidationSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "suites") {
      spec.suites = value.get<std::vector<std::string>>();
      for (const auto& s : spec.suites) {
        if (s != "formula-vs-oracle" && s != "cross-path" && s != "properties" &&
            s != "dual-route") {
          throw InvalidArgument("unknown suite '" + s + "'");
        }
      }
    } else if (key == "filter") {
      spec.filter = value.get<std::string>();
    } else if (key == "mc_samples") {
      spec.mc_samples = value.get<long>();
      if (spec.mc_samples < 10000) throw InvalidArgument("mc_samples must be >= 1e4");
    } else if (key == "psk_symbols") {
      spec.psk_symbols = value.get<long>();
      if (spec.psk_symbols < 100000) throw InvalidArgument("psk_symbols must be >= 1e5");
    } else if (key == "configs_per_scheme") {
      spec.configs_per_scheme = value.get<int>();
      if (spec.configs_per_scheme < 1) throw InvalidArgument("configs_per_scheme must be >= 1");
    } else if (key == "z_max") {
      spec.z_max = value.get<double>();
      if (!(spec.z_max >= 0.0)) throw InvalidArgument("z_max must be >= 0");
    } else if (key == "cross_tol") {
      spec.cross_tol = value.get<double>();
      if (!(spec.cross_tol >= 0.0)) throw InvalidArgument("cross_tol must be >= 0");
    } else if (key == "seed") {
      spec.seed = value.get<std::uint64_t>();
    } else if (key == "jobs") {
      spec.jobs = value.get<int>();
      if (spec.jobs < 1) throw InvalidArgument("jobs must be >= 1");
    } else if (key == "out") {
      spec.out_path = value.get<std::string>();
    } else {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }
  return spec;
}

std::vector<std::string> sweep_columns(const std::string& scheme) {
  std::vector<std::string> cols = scheme_params(scheme);
  const auto& outs = scheme_outputs(scheme);
  cols.insert(cols.end(), outs.begin(), outs.end());
  return cols;
}

SweepResult run_sweep(const SweepSpec& spec, int jobs) {
  const auto& names = scheme_params(spec.scheme);
  std::vector<const std::vector<double>*> axes;
  std::size_t n_rows = 1;
  for (const auto& name : names) {
    axes.push_back(&spec.grid.at(name));
    n_rows *= axes.back()->size();
  }
  if (n_rows > spec.max_rows) throw InvalidArgument("grid has more than max_rows points");

  SweepResult result;
  result.scheme = spec.scheme;
  result.columns = sweep_columns(spec.scheme);
  result.rows.resize(n_rows);

  auto compute = [&](std::size_t row) {
    std::vector<double> params(names.size());
    std::size_t rem = row;
    for (std::size_t d = names.size(); d-- > 0;) {
      params[d] = (*axes[d])[rem % axes[d]->size()];
      rem /= axes[d]->size();
    }
    result.rows[row] = eval_row(spec, params, row);
  };

  const int workers = std::max(1, jobs);
  if (workers == 1 || n_rows < 2) {
    for (std::size_t r = 0; r < n_rows; ++r) compute(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t r = next.fetch_add(1); r < n_rows; r = next.fetch_add(1)) {
          compute(r);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return result;
}

std::string render_csv(const SweepResult& result) {
  std::string out = "scheme";
  for (const auto& c : result.columns) {
    out += ',';
    out += c;
  }
  out += ",error\n";
  for (const auto& row : result.rows) {
    out += result.scheme;
    for (double v : row.values) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += csv_escape(row.error);
    out += '\n';
  }
  return out;
}

std::string render_jsonl(const SweepResult& result) {
  std::string out;
  for (const auto& row : result.rows) {
    json rec;
    rec["scheme"] = result.scheme;
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
      rec[result.columns[i]] = row.values[i];
    }
    rec["error"] = row.error;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

}  // namespace steep::sweep

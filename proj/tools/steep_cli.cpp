#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "steep/channel.hpp"
#include "steep/errors.hpp"
#include "steep/gsteep.hpp"
#include "steep/mc_oracle.hpp"
#include "steep/msteep.hpp"
#include "steep/psteep.hpp"
#include "steep/sweep.hpp"
#include "steep/validation.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw steep::InvalidArgument("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw steep::InvalidArgument("cannot open output file '" + path + "'");
  out << text;
}

bool seed_from_env(std::uint64_t& seed) {
  const char* env = std::getenv("STEEP_SEED");
  if (env == nullptr || *env == '\0') return false;
  seed = std::strtoull(env, nullptr, 10);
  return true;
}

std::string render_reports_csv(const std::vector<steep::McReport>& reports) {
  std::string out = "quantity,analytic,empirical,std_error,n_samples,z_score,pass,gated\n";
  char buf[160];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%ld,%.17g", r.analytic, r.empirical,
                  r.std_error, r.n_samples, r.z_score);
    out += r.quantity;
    out += ',';
    out += buf;
    out += r.pass ? ",1" : ",0";
    out += r.gated ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STEEP secrecy-rate toolkit: closed forms, sweeps, and Monte Carlo checks"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "csv";
  std::uint64_t seed_flag = 0;
  bool seed_given = false;
  int jobs = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--out", out_path, "output path (default stdout)");
    cmd->add_option("--seed", seed_flag, "seed override")->each([&](const std::string&) {
      seed_given = true;
    });
    cmd->add_option("--jobs", jobs, "worker threads (1 = serial)");
  };

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a parameter grid");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--format", format, "csv or jsonl");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "run the formula validation suites");
  add_common(validate_cmd);
  std::string filter;
  validate_cmd->add_option("--filter", filter, "substring filter on check names");

  // rate: single-point evaluation
  auto* rate_cmd = app.add_subcommand("rate", "single-point secrecy rate");
  std::string scheme = "gsteep";
  double a = 100.0, b = 1000.0, alpha = 2.0, beta = 2.0;
  int m = 2;
  double sigma2 = 0.5, sigma2_a = 0.3, sigma2_e = 0.3, sigma2_ea = 0.8;
  rate_cmd->add_option("--scheme", scheme, "gsteep | psteep | msteep");
  rate_cmd->add_option("--a", a, "phase-1 user SNR");
  rate_cmd->add_option("--b", b, "phase-2 user SNR");
  rate_cmd->add_option("--alpha", alpha, "Eve/user SNR ratio, phase 1");
  rate_cmd->add_option("--beta", beta, "Eve/user SNR ratio, phase 2");
  rate_cmd->add_option("--m", m, "PSK size (psteep) or UE count (msteep)");
  rate_cmd->add_option("--sigma2", sigma2, "msteep probe noise variance");
  rate_cmd->add_option("--sigma2-a", sigma2_a, "msteep AP-side echo noise variance");
  rate_cmd->add_option("--sigma2-e", sigma2_e, "msteep Eve-side echo noise variance");
  rate_cmd->add_option("--sigma2-ea", sigma2_ea, "msteep Eve-side probe noise variance");
  int rate_na = 0, rate_nb = 1, rate_ne = 1;
  double rate_pa = 1.0, rate_pb = 1.0;
  std::uint64_t rate_seed = 1;
  rate_cmd->add_option("--na", rate_na, "sample a MIMO instance: Alice antennas");
  rate_cmd->add_option("--nb", rate_nb, "Bob antennas (MIMO mode)");
  rate_cmd->add_option("--ne", rate_ne, "Eve antennas (MIMO mode)");
  rate_cmd->add_option("--pa", rate_pa, "probe power (MIMO mode)");
  rate_cmd->add_option("--pb", rate_pb, "echo power (MIMO mode)");
  rate_cmd->add_option("--seed", rate_seed, "channel seed (MIMO mode)");
  rate_cmd->add_option("--out", out_path, "output path (default stdout)");

  // mc: oracle run
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo protocol oracle");
  std::string mc_scheme = "gsteep";
  long samples = 1000000;
  int n_a = 2, n_b = 1, n_e = 2;
  double p_a = 5.0, p_b = 20.0;
  std::uint64_t mc_seed = 1;
  mc_cmd->add_option("--scheme", mc_scheme, "gsteep | psteep | msteep");
  mc_cmd->add_option("--samples", samples, "samples (gsteep/msteep) or symbols (psteep)");
  mc_cmd->add_option("--na", n_a, "Alice/AP antennas");
  mc_cmd->add_option("--nb", n_b, "Bob antennas");
  mc_cmd->add_option("--ne", n_e, "Eve antennas");
  mc_cmd->add_option("--pa", p_a, "probe power");
  mc_cmd->add_option("--pb", p_b, "echo power");
  mc_cmd->add_option("--a", a, "phase-1 SNR (psteep)");
  mc_cmd->add_option("--b", b, "phase-2 SNR (psteep)");
  mc_cmd->add_option("--alpha", alpha, "Eve ratio phase 1 (psteep)");
  mc_cmd->add_option("--beta", beta, "Eve ratio phase 2 (psteep)");
  mc_cmd->add_option("--m", m, "PSK size or UE count");
  mc_cmd->add_option("--sigma2", sigma2, "msteep probe noise variance");
  mc_cmd->add_option("--sigma2-a", sigma2_a, "msteep AP echo noise variance");
  mc_cmd->add_option("--sigma2-e", sigma2_e, "msteep Eve echo noise variance");
  mc_cmd->add_option("--sigma2-ea", sigma2_ea, "msteep Eve probe noise variance");
  mc_cmd->add_option("--seed", mc_seed, "oracle seed");
  mc_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep_cmd->parsed()) {
      if (config_path.empty()) throw steep::InvalidArgument("sweep needs --config");
      steep::sweep::SweepSpec spec = steep::sweep::parse_sweep_spec(read_file(config_path));
      if (seed_given) spec.seed = seed_flag;
      std::uint64_t env_seed;
      if (seed_from_env(env_seed)) spec.seed = env_seed;
      if (!out_path.empty()) spec.out_path = out_path;
      if (sweep_cmd->count("--format") > 0) spec.format = format;
      if (spec.format != "csv" && spec.format != "jsonl") {
        throw steep::InvalidArgument("format must be 'csv' or 'jsonl'");
      }
      const steep::sweep::SweepResult result = steep::sweep::run_sweep(spec, jobs);
      write_output(spec.out_path, spec.format == "csv"
                                      ? steep::sweep::render_csv(result)
                                      : steep::sweep::render_jsonl(result));
      return kExitPass;
    }

    if (validate_cmd->parsed()) {
      steep::sweep::ValidationSpec spec;
      if (!config_path.empty()) {
        spec = steep::sweep::parse_validation_spec(read_file(config_path));
      }
      if (seed_given) spec.seed = seed_flag;
      std::uint64_t env_seed;
      if (seed_from_env(env_seed)) spec.seed = env_seed;
      if (!out_path.empty()) spec.out_path = out_path;
      if (!filter.empty()) spec.filter = filter;
      if (jobs > 1) spec.jobs = jobs;
      const auto results = steep::validation::run_validation(spec);
      write_output(spec.out_path, steep::validation::render_report(results));
      return steep::validation::all_passed(results) ? kExitPass : kExitCheckFailed;
    }

    if (rate_cmd->parsed()) {
      std::string text;
      if (scheme == "gsteep" && rate_na > 0) {
        // one sampled MIMO instance
        const steep::ChannelSet cs =
            steep::sample_channels(rate_na, rate_nb, rate_ne, rate_seed);
        const steep::PowerConfig pw{rate_pa, rate_pb};
        const steep::SecrecyBreakdown r = steep::gsteep_secrecy_rate(cs, pw);
        const steep::ScaledChannelSet sc = steep::scale_channels(cs, pw);
        char buf[256];
        std::snprintf(buf, sizeof(buf), "c_user,c_eve,r_s,c_key\n%.17g,%.17g,%.17g,%.17g\n",
                      r.c_user, r.c_eve, r.r_s,
                      steep::secret_key_capacity(sc.h_ba_p, sc.h_ea_p));
        text = buf;
      } else if (scheme == "gsteep") {
        const steep::SisoSnr snr{a, b, alpha, beta};
        const steep::SecrecyBreakdown r = steep::siso_secrecy_rate(snr);
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "c_user,c_eve,r_s,c_key,b_threshold\n%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.c_user, r.c_eve, r.r_s, steep::siso_key_capacity(a, alpha),
                      steep::siso_threshold_b(a, alpha, beta));
        text = buf;
      } else if (scheme == "psteep") {
        const steep::SisoSnr snr{a, b, alpha, beta};
        const steep::PskErrorParams pe = steep::psk_error_params(m, snr);
        const steep::PsteepRate r = steep::psteep_secrecy_rate(m, snr);
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "p_e_alice,p_e_eve,c_user,c_eve,r_s\n%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      pe.p_ea, pe.p_ee, r.c_user, r.c_eve, r.r_s);
        text = buf;
      } else if (scheme == "msteep") {
        const steep::SymmetricAnalysis sym =
            steep::symmetric_analysis(sigma2, sigma2_a, sigma2_e, sigma2_ea, m);
        text = "term,r_s\n";
        char buf[64];
        for (std::size_t i = 0; i < sym.r_terms.size(); ++i) {
          std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, sym.r_terms[i]);
          text += buf;
        }
      } else {
        throw steep::InvalidArgument("rate: unknown scheme '" + scheme + "'");
      }
      write_output(out_path, text);
      return kExitPass;
    }

    // mc
    std::vector<steep::McReport> reports;
    if (mc_scheme == "gsteep") {
      const steep::ChannelSet cs = steep::sample_channels(n_a, n_b, n_e, mc_seed);
      reports = steep::mc_gsteep(cs, {p_a, p_b}, samples, mc_seed);
    } else if (mc_scheme == "psteep") {
      reports = steep::mc_psteep(m, {a, b, alpha, beta}, samples, mc_seed);
    } else if (mc_scheme == "msteep") {
      const steep::MultiAccessNetwork net =
          steep::symmetric_network(sigma2, sigma2_a, sigma2_e, sigma2_ea, m);
      reports = steep::mc_msteep(net, samples, mc_seed);
    } else {
      throw steep::InvalidArgument("mc: unknown scheme '" + mc_scheme + "'");
    }
    write_output(out_path, render_reports_csv(reports));
    for (const auto& r : reports) {
      if (r.gated && !r.pass) return kExitCheckFailed;
    }
    return kExitPass;
  } catch (const steep::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

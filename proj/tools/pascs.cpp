#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pascs/io.hpp"
#include "pascs/moments.hpp"
#include "pascs/pnd.hpp"
#include "pascs/state_spec.hpp"
#include "pascs/sweep.hpp"
#include "pascs/verify.hpp"
#include "pascs/wigner.hpp"
#include "pascs/witnesses.hpp"

namespace {

struct SpecArgs {
  std::string op = "add";
  int m = 0;
  double alpha_mod = 0.0, alpha_arg = 0.0;
  double alpha_re = 0.0, alpha_im = 0.0;
  bool polar_used = false;
  double r = 0.0;
  double phi = 0.0;
  std::string config_path;
  CLI::Option *op_opt = nullptr, *m_opt = nullptr, *mod_opt = nullptr, *arg_opt = nullptr,
              *re_opt = nullptr, *im_opt = nullptr, *r_opt = nullptr, *phi_opt = nullptr;

  pascs::StateSpec to_spec() const {
    pascs::Complex alpha = polar_used ? std::polar(alpha_mod, alpha_arg)
                                      : pascs::Complex(alpha_re, alpha_im);
    return pascs::StateSpec(pascs::operation_from_string(op), m, alpha, r, phi);
  }

  // Flat key = value config; command-line flags win over file values.
  void apply_config() {
    if (config_path.empty()) return;
    std::ifstream is(config_path);
    if (!is) throw pascs::argument_error("cannot read config file '" + config_path + "'");
    auto kv = pascs::read_kv_file(is);
    auto take = [&kv](const std::string& key, CLI::Option* given, auto&& set) {
      std::string alt = key;
      for (char& c : alt)
        if (c == '-') c = '_';
      for (const std::string& name : {key, alt}) {
        auto it = kv.find(name);
        if (it == kv.end()) continue;
        if (given == nullptr || given->count() == 0) set(it->second);
        kv.erase(it);
      }
    };
    take("op", op_opt, [&](const std::string& v) { op = v; });
    take("m", m_opt, [&](const std::string& v) { m = std::stoi(v); });
    take("alpha-mod", mod_opt, [&](const std::string& v) {
      alpha_mod = std::stod(v);
      polar_used = true;
    });
    take("alpha-arg", arg_opt, [&](const std::string& v) {
      alpha_arg = std::stod(v);
      polar_used = true;
    });
    take("alpha-re", re_opt, [&](const std::string& v) { alpha_re = std::stod(v); });
    take("alpha-im", im_opt, [&](const std::string& v) { alpha_im = std::stod(v); });
    take("r", r_opt, [&](const std::string& v) { r = std::stod(v); });
    take("phi", phi_opt, [&](const std::string& v) { phi = std::stod(v); });
    if (!kv.empty())
      throw pascs::argument_error("config: unknown key '" + kv.begin()->first + "'");
  }
};

// Shared state-parameter flags; alpha accepts polar (figure style) or
// cartesian form.
void add_spec_options(CLI::App* cmd, SpecArgs& args) {
  args.op_opt = cmd->add_option("--op", args.op, "add | sub")->check(CLI::IsMember({"add", "sub"}));
  args.m_opt =
      cmd->add_option("--m", args.m, "photons added/subtracted")->check(CLI::NonNegativeNumber);
  args.mod_opt = cmd->add_option("--alpha-mod", args.alpha_mod, "|alpha|");
  args.arg_opt = cmd->add_option("--alpha-arg", args.alpha_arg, "arg(alpha) in radians");
  args.re_opt = cmd->add_option("--alpha-re", args.alpha_re, "Re(alpha)");
  args.im_opt = cmd->add_option("--alpha-im", args.alpha_im, "Im(alpha)");
  args.re_opt->excludes(args.mod_opt)->excludes(args.arg_opt);
  args.im_opt->excludes(args.mod_opt)->excludes(args.arg_opt);
  args.r_opt = cmd->add_option("--r", args.r, "squeezing magnitude (>= 0)");
  args.phi_opt = cmd->add_option("--phi", args.phi, "squeeze angle in radians");
  cmd->add_option("--config", args.config_path,
                  "flat key=value file mirroring the state flags");
  cmd->parse_complete_callback([&args]() {
    args.polar_used = args.mod_opt->count() > 0 || args.arg_opt->count() > 0;
    args.apply_config();
  });
}

std::string resolve_output(const std::string& out_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || out_dir.empty()) return path;
  return (std::filesystem::path(out_dir) / p).string();
}

// Writes through a temporary buffer so reruns with identical inputs produce
// byte-identical files.
void write_or_print(const std::string& out_dir, const std::string& path,
                    const std::function<void(std::ostream&)>& emit) {
  if (path.empty()) {
    emit(std::cout);
    return;
  }
  std::string full = resolve_output(out_dir, path);
  std::ofstream os(full, std::ios::binary);
  if (!os) throw pascs::argument_error("cannot open output file '" + full + "'");
  emit(os);
  std::cerr << "wrote " << full << "\n";
}

void print_witness_text(const pascs::WitnessReport& rep, std::ostream& os) {
  os << "state: " << pascs::kv_string(rep.spec) << "\n";
  auto line = [&](const std::string& name, double v) {
    os << "  " << name << " = ";
    if (std::isnan(v)) {
      os << "undefined\n";
      return;
    }
    os << pascs::format_double(v);
    auto it = rep.flags.find(name);
    if (it != rep.flags.end() && it->second) os << "   [nonclassical]";
    os << "\n";
  };
  line("Q", rep.q_mandel);
  for (const auto& [n, v] : rep.D) line("D" + std::to_string(n - 1), v);
  for (const auto& [n, v] : rep.d) line("d" + std::to_string(n - 1), v);
  line("A3", rep.a3);
  for (const auto& [n, v] : rep.S) line("S" + std::to_string(n), v);
  if (rep.precision_demoted)
    os << "  note: large cancellation detected; precision claims demoted\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-form photon-added/subtracted squeezed coherent states: "
               "nonclassicality witnesses, distributions, Wigner functions, and "
               "oracle cross-validation"};
  app.require_subcommand(1);
  app.fallthrough();  // global options remain valid after a subcommand name

  std::string out_dir;
  app.add_option("--out-dir", out_dir, "directory for output files")
      ->envname("PASCS_OUT_DIR");

  // witness
  SpecArgs w_args;
  std::string w_format = "text", w_out;
  int w_orders = 5;
  auto* witness = app.add_subcommand("witness", "all scalar witnesses for one state");
  add_spec_options(witness, w_args);
  witness->add_option("--format", w_format)->check(CLI::IsMember({"text", "csv", "json"}));
  witness->add_option("-o,--output", w_out, "output file (default stdout)");
  witness->add_option("--orders", w_orders, "max antibunching order n")->check(CLI::Range(2, 8));

  // pnd
  SpecArgs p_args;
  std::string p_out;
  int p_nmax = 40;
  bool p_klyshko = false;
  auto* pnd_cmd = app.add_subcommand("pnd", "photon-number distribution");
  add_spec_options(pnd_cmd, p_args);
  pnd_cmd->add_option("--n-max", p_nmax, "highest reported n")->check(CLI::Range(1, 4096));
  pnd_cmd->add_flag("--klyshko", p_klyshko, "append Klyshko B(n) column");
  pnd_cmd->add_option("-o,--output", p_out);

  // wigner
  SpecArgs g_args;
  std::string g_out;
  double g_halfwidth = 0.0;
  int g_nx = 81, g_np = 81;
  bool g_binary = false;
  auto* wig = app.add_subcommand("wigner", "Wigner function on a phase-space grid");
  add_spec_options(wig, g_args);
  wig->add_option("--halfwidth", g_halfwidth, "half-width of the (x,p) grid (0 = auto)");
  wig->add_option("--nx", g_nx)->check(CLI::Range(2, 4096));
  wig->add_option("--np", g_np)->check(CLI::Range(2, 4096));
  wig->add_flag("--binary", g_binary, "binary matrix output instead of CSV");
  wig->add_option("-o,--output", g_out);

  // volume
  SpecArgs v_args;
  double v_tol = 1e-6;
  auto* vol = app.add_subcommand("volume", "nonclassical volume delta");
  add_spec_options(vol, v_args);
  vol->add_option("--tol", v_tol, "convergence tolerance (>= 1e-6)");

  // sweep
  SpecArgs s_args;
  std::string s_preset, s_out, s_format = "csv", s_quantities = "Q,D1,D2,d1,d2,A3,S2,S4";
  std::string s_param, s_param2;
  double s_start = 0.0, s_stop = 1.0, s_start2 = 0.0, s_stop2 = 0.0;
  int s_steps = 51, s_steps2 = 0, s_threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweeps and figure presets");
  add_spec_options(sweep_cmd, s_args);
  sweep_cmd->add_option("--preset", s_preset,
                        "figure preset (fig1a..fig9d); overrides the generic axes");
  sweep_cmd->add_option("--param", s_param, "swept parameter name");
  sweep_cmd->add_option("--start", s_start);
  sweep_cmd->add_option("--stop", s_stop);
  sweep_cmd->add_option("--steps", s_steps)->check(CLI::Range(2, 100000));
  sweep_cmd->add_option("--param2", s_param2, "optional second swept parameter");
  sweep_cmd->add_option("--start2", s_start2);
  sweep_cmd->add_option("--stop2", s_stop2);
  sweep_cmd->add_option("--steps2", s_steps2);
  sweep_cmd->add_option("--quantities", s_quantities, "comma-separated quantity list");
  sweep_cmd->add_option("--format", s_format)->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->add_option("--threads", s_threads, "worker threads (0 = auto)");
  sweep_cmd->add_option("-o,--output", s_out, "output file (default stdout)");

  // verify
  bool verify_quick = false;
  int verify_threads = 0;
  double verify_fault = 0.0;
  auto* ver = app.add_subcommand("verify", "cross-validate closed forms against the Fock oracle");
  ver->add_flag("--quick", verify_quick, "reduced grid (m <= 1, orders <= 2)");
  ver->add_option("--threads", verify_threads, "worker threads (0 = auto)");
  ver->add_option("--inject-moment-fault", verify_fault)
      ->group("");  // hidden: fault-injection hook for the test harness

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*witness) {
      auto rep = pascs::witness_report(w_args.to_spec(), w_orders);
      write_or_print(out_dir, w_out, [&](std::ostream& os) {
        if (w_format == "text") print_witness_text(rep, os);
        else if (w_format == "csv") os << pascs::witness_csv(rep);
        else os << pascs::witness_json(rep).dump(2) << "\n";
      });
    } else if (*pnd_cmd) {
      auto spec = p_args.to_spec();
      auto dist = pascs::pnd(spec, p_nmax);
      write_or_print(out_dir, p_out, [&](std::ostream& os) {
        if (!p_klyshko) {
          pascs::pnd_csv(dist, os);
          return;
        }
        os << "# " << pascs::kv_string(dist.spec) << "\n";
        os << "# tail_mass=" << pascs::format_double(dist.tail_mass) << "\n";
        os << "n,P_n,B\n";
        for (int n = 0; n <= dist.n_report(); ++n) {
          os << n << ',' << pascs::format_double(dist.probabilities[n]) << ',';
          if (n + 2 <= dist.n_report()) os << pascs::format_double(pascs::klyshko(dist, n));
          os << '\n';
        }
      });
    } else if (*wig) {
      auto spec = g_args.to_spec();
      double hw = g_halfwidth > 0.0 ? g_halfwidth : pascs::default_grid_halfwidth(spec);
      auto grid = pascs::wigner_grid(spec, -hw, hw, -hw, hw, g_nx, g_np);
      write_or_print(out_dir, g_out, [&](std::ostream& os) {
        if (g_binary) pascs::wigner_grid_binary(grid, os);
        else pascs::wigner_grid_csv(grid, os);
      });
    } else if (*vol) {
      auto res = pascs::nonclassical_volume(v_args.to_spec(), v_tol);
      std::cout << "delta = " << pascs::format_double(res.delta) << "\n"
                << "integration_halfwidth = " << pascs::format_double(res.integration_radius)
                << "\n"
                << "estimated_tail = " << pascs::format_double(res.estimated_tail) << "\n"
                << "refinement_levels = " << res.refinement_levels << "\n";
    } else if (*sweep_cmd) {
      if (!s_preset.empty()) {
        for (auto& out : pascs::preset_outputs(s_preset, s_threads)) {
          write_or_print(out_dir, out.filename, out.emit);
        }
      } else {
        if (s_param.empty())
          throw pascs::argument_error("sweep: give --preset or --param");
        pascs::SweepConfig cfg;
        cfg.base = s_args.to_spec();
        cfg.axes.push_back({pascs::sweep_param_from_string(s_param), s_start, s_stop, s_steps});
        if (!s_param2.empty())
          cfg.axes.push_back(
              {pascs::sweep_param_from_string(s_param2), s_start2, s_stop2, s_steps2});
        std::stringstream qs(s_quantities);
        std::string q;
        while (std::getline(qs, q, ',')) {
          if (!q.empty()) cfg.quantities.push_back(q);
        }
        cfg.format = (s_format == "csv") ? pascs::SweepFormat::Csv : pascs::SweepFormat::Json;
        cfg.threads = s_threads;
        write_or_print(out_dir, s_out, [&](std::ostream& os) { pascs::run_sweep(cfg, os); });
      }
    } else if (*ver) {
      pascs::verify::VerifyOptions opts;
      opts.quick = verify_quick;
      opts.threads = verify_threads;
      opts.moment_fault = verify_fault;
      auto report = pascs::verify::run_verify(opts);
      pascs::verify::print_report(report, std::cout);
      if (!report.pass) return 4;
    }
  } catch (const pascs::degenerate_state_error& e) {
    std::cerr << "degenerate state: " << e.what() << "\n";
    return 3;
  } catch (const pascs::convergence_error& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 5;
  } catch (const pascs::erratum_error& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 4;
  } catch (const pascs::argument_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const pascs::bounds_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
